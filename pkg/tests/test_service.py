import json
import threading

import pytest
from fastapi.testclient import TestClient

from imdskit.service import create_app, load_models, model_paths


@pytest.fixture(scope="module")
def client(request):
    models = load_models(model_paths(request.config.rootpath / "models"))
    return TestClient(create_app(models))


def test_list_models(client):
    r = client.get("/models")
    assert r.status_code == 200
    body = r.json()
    assert body["schema_version"] == 1
    assert {"buffer_server", "buffer_agent", "crossed"} <= set(body["models"])


def test_model_detail_includes_report_and_automata(client):
    r = client.get("/models/buffer_server")
    assert r.status_code == 200
    body = r.json()
    assert body["agents"] == ["Aprod", "Acons"]
    total = next(v for v in body["report"]["verdicts"]
                 if v["kind"] == "total-deadlock")
    assert total["holds"] is False
    assert body["automata"]["sda3"]["automata"][0]["id"] == "buf"
    assert len(body["actions"]) == 6


def test_unknown_model_404(client):
    assert client.get("/models/nope").status_code == 404


def test_session_lifecycle(client):
    r = client.post("/sessions", json={"model": "crossed", "view": "ada3"})
    assert r.status_code == 201
    sid = r.json()["session"]
    snap = r.json()["snapshot"]
    assert snap["current"]["nodes"] == {"a1": "sem1.p", "a2": "sem2.p"}

    r1 = client.get(f"/sessions/{sid}")
    r2 = client.get(f"/sessions/{sid}")
    assert r1.json() == r2.json()  # idempotent reads

    r = client.post(f"/sessions/{sid}/step", json={"transition": 0})
    assert r.status_code == 200
    r = client.post(f"/sessions/{sid}/step", json={"transition": 3})
    assert r.status_code == 200
    assert r.json()["snapshot"]["configuration"].endswith(
        "sem1.down, sem2.down")
    r = client.post(f"/sessions/{sid}/step", json={"transition": 0})
    assert r.status_code == 409

    assert client.delete(f"/sessions/{sid}").status_code == 204
    assert client.get(f"/sessions/{sid}").status_code == 404
    assert client.delete(f"/sessions/{sid}").status_code == 404


def test_create_session_rejects_bad_input(client):
    assert client.post("/sessions",
                       json={"model": "nope", "view": "ada3"}).status_code == 404
    assert client.post("/sessions",
                       json={"model": "crossed", "view": "x"}).status_code == 400
    assert client.post("/sessions", json={"oops": 1}).status_code == 400


def test_step_by_label(client):
    sid = client.post("/sessions", json={"model": "buffer_server",
                                         "view": "sda3"}).json()["session"]
    label = "{Aprod.Sprod.doSth, Sprod.neutral} -> {Aprod.buf.put, Sprod.prod}"
    r = client.post(f"/sessions/{sid}/step", json={"transition": label})
    assert r.status_code == 200
    assert r.json()["focus"] == "buf"
    r = client.post(f"/sessions/{sid}/step", json={"transition": "no such"})
    assert r.status_code == 409


def test_undo_and_reset(client):
    sid = client.post("/sessions", json={"model": "crossed",
                                         "view": "ada3"}).json()["session"]
    assert client.post(f"/sessions/{sid}/undo").status_code == 409
    client.post(f"/sessions/{sid}/step", json={"transition": 0})
    r = client.post(f"/sessions/{sid}/undo")
    assert r.status_code == 200
    assert r.json()["snapshot"]["history"] == []
    client.post(f"/sessions/{sid}/step", json={"transition": 0})
    r = client.post(f"/sessions/{sid}/reset")
    assert r.json()["snapshot"]["history"] == []


def test_trace_by_verdict_id(client):
    sid = client.post("/sessions", json={"model": "crossed",
                                         "view": "ada3"}).json()["session"]
    r = client.post(f"/sessions/{sid}/trace", json={"verdict": "total-deadlock"})
    assert r.status_code == 200
    assert len(r.json()["snapshot"]["pinned_trace"]) == 2

    assert client.post(f"/sessions/{sid}/trace",
                       json={"verdict": "no-such"}).status_code == 404

    bid = client.post("/sessions", json={"model": "buffer_server",
                                         "view": "sda3"}).json()["session"]
    r = client.post(f"/sessions/{bid}/trace", json={"verdict": "total-deadlock"})
    assert r.status_code == 409  # verdict does not hold, no witness


def test_trace_by_actions_and_mismatch(client):
    sid = client.post("/sessions", json={"model": "crossed",
                                         "view": "sda3"}).json()["session"]
    r = client.post(f"/sessions/{sid}/trace", json={"actions": [0, 2]})
    assert r.status_code == 200
    r = client.post(f"/sessions/{sid}/trace", json={"actions": [2, 0]})
    assert r.status_code == 409
    r = client.post(f"/sessions/{sid}/trace", json={})
    assert r.status_code == 400


def test_concurrent_steps_serialize(client):
    sid = client.post("/sessions", json={"model": "crossed",
                                         "view": "ada3"}).json()["session"]
    codes = []

    def hit():
        codes.append(client.post(f"/sessions/{sid}/step",
                                 json={"transition": 0}).status_code)

    threads = [threading.Thread(target=hit) for _ in range(8)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    assert codes.count(200) == 1 and codes.count(409) == 7
    snap = client.get(f"/sessions/{sid}").json()["snapshot"]
    assert snap["history"] == [0]


def test_root_index_without_ui(client):
    r = client.get("/")
    assert r.status_code == 200
    assert r.json()["service"] == "imdskit"
