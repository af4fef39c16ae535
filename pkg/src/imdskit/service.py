"""Local HTTP JSON API over models, verdicts, and simulation sessions.

State lives in memory only: models (with their analyses) are loaded once at
startup, sessions are created per client and guarded by a per-session lock
so concurrent mutations serialize.  The companion browser UI is served from
a static directory mounted at the root when available.
"""

import threading
import uuid
from dataclasses import dataclass
from pathlib import Path

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from .analysis import Report, analyze, report_json
from .automata import automata_json
from .explore import Limits
from .lts import Lts, build_lts
from .model import SystemModel
from .parser import parse_file
from .simulator import (NothingToUndo, Session, TraceMismatch,
                        TransitionNotEnabled, snapshot)

SCHEMA_VERSION = 1


@dataclass
class ModelEntry:
    model_id: str
    model: SystemModel
    lts: Lts
    report: Report


@dataclass
class SessionEntry:
    session: Session
    model_id: str
    lock: threading.Lock


class CreateSessionBody(BaseModel):
    model: str
    view: str


class StepBody(BaseModel):
    transition: int | str


class TraceBody(BaseModel):
    verdict: str | None = None
    actions: list[int | str] | None = None


def load_models(paths, limits: Limits = Limits()) -> dict[str, ModelEntry]:
    """Parse and analyze every .imds file; errors surface immediately."""
    entries = {}
    for path in paths:
        path = Path(path)
        model, _view = parse_file(path)
        lts = build_lts(model, limits)
        entries[path.stem] = ModelEntry(path.stem, model, lts, analyze(lts))
    return entries


def model_paths(target) -> list[Path]:
    target = Path(target)
    if target.is_dir():
        return sorted(target.glob("*.imds"))
    return [target]


def create_app(models: dict[str, ModelEntry],
               ui_dir: Path | None = None) -> FastAPI:
    app = FastAPI(title="imdskit", version="0.1.0")
    entries = models
    sessions: dict[str, SessionEntry] = {}

    @app.exception_handler(RequestValidationError)
    async def malformed(request: Request, exc: RequestValidationError):
        return JSONResponse(status_code=400,
                            content={"error": "malformed body", "detail": str(exc)})

    def err(status: int, message: str) -> JSONResponse:
        return JSONResponse(status_code=status, content={"error": message})

    def resolve_action(model: SystemModel, ref) -> int:
        if isinstance(ref, int):
            return ref
        if ref.lstrip("-").isdigit():
            return int(ref)
        return model.action_by_label(ref)

    @app.get("/models")
    def list_models():
        return {"schema_version": SCHEMA_VERSION,
                "models": sorted(entries.keys())}

    @app.get("/models/{model_id}")
    def get_model(model_id: str):
        entry = entries.get(model_id)
        if entry is None:
            return err(404, f"unknown model {model_id}")
        m = entry.model
        return {
            "schema_version": SCHEMA_VERSION,
            "id": entry.model_id,
            "name": m.name,
            "servers": [{"name": s.name, "values": list(s.values),
                         "services": list(s.services)} for s in m.servers],
            "agents": list(m.agents),
            "actions": [{"id": i, "label": a.label, "terminating": a.terminating}
                        for i, a in enumerate(m.actions)],
            "automata": {"sda3": automata_json(m, "sda3"),
                         "ada3": automata_json(m, "ada3")},
            "report": report_json(entry.report),
        }

    @app.post("/sessions", status_code=201)
    def create_session(body: CreateSessionBody):
        entry = entries.get(body.model)
        if entry is None:
            return err(404, f"unknown model {body.model}")
        if body.view not in ("sda3", "ada3"):
            return err(400, f"unknown view {body.view}")
        sid = uuid.uuid4().hex
        sessions[sid] = SessionEntry(Session(entry.model, body.view),
                                     body.model, threading.Lock())
        return {"schema_version": SCHEMA_VERSION, "session": sid,
                "model": body.model, "snapshot": snapshot(sessions[sid].session)}

    def get_entry(sid: str) -> SessionEntry | None:
        return sessions.get(sid)

    @app.get("/sessions/{sid}")
    def get_session(sid: str):
        se = get_entry(sid)
        if se is None:
            return err(404, f"unknown session {sid}")
        with se.lock:
            return {"schema_version": SCHEMA_VERSION, "session": sid,
                    "model": se.model_id, "snapshot": snapshot(se.session)}

    @app.post("/sessions/{sid}/step")
    def step(sid: str, body: StepBody):
        se = get_entry(sid)
        if se is None:
            return err(404, f"unknown session {sid}")
        with se.lock:
            try:
                aid = resolve_action(se.session.model, body.transition)
            except KeyError:
                return err(409, f"unknown transition {body.transition!r}")
            try:
                result = se.session.step(aid)
            except TransitionNotEnabled as e:
                return err(409, str(e))
            return {"schema_version": SCHEMA_VERSION, "session": sid,
                    "focus": result.focus, "snapshot": snapshot(se.session)}

    @app.post("/sessions/{sid}/undo")
    def undo(sid: str):
        se = get_entry(sid)
        if se is None:
            return err(404, f"unknown session {sid}")
        with se.lock:
            try:
                se.session.undo()
            except NothingToUndo as e:
                return err(409, str(e))
            return {"schema_version": SCHEMA_VERSION, "session": sid,
                    "snapshot": snapshot(se.session)}

    @app.post("/sessions/{sid}/reset")
    def reset(sid: str):
        se = get_entry(sid)
        if se is None:
            return err(404, f"unknown session {sid}")
        with se.lock:
            se.session.reset()
            return {"schema_version": SCHEMA_VERSION, "session": sid,
                    "snapshot": snapshot(se.session)}

    @app.post("/sessions/{sid}/trace")
    def load_trace(sid: str, body: TraceBody):
        se = get_entry(sid)
        if se is None:
            return err(404, f"unknown session {sid}")
        entry = entries[se.model_id]
        with se.lock:
            if body.verdict is not None:
                verdict = entry.report.verdict_by_id(body.verdict)
                if verdict is None:
                    return err(404, f"unknown verdict {body.verdict}")
                if not verdict.holds or verdict.witness is None:
                    return err(409, f"verdict {body.verdict} has no witness")
                trace = verdict.witness
            elif body.actions is not None:
                try:
                    trace = [resolve_action(se.session.model, a)
                             for a in body.actions]
                except KeyError as e:
                    return err(409, f"unknown transition {e.args[0]!r}")
            else:
                return err(400, "body needs 'verdict' or 'actions'")
            try:
                se.session.load_trace(trace)
            except TraceMismatch as e:
                return err(409, str(e))
            return {"schema_version": SCHEMA_VERSION, "session": sid,
                    "snapshot": snapshot(se.session)}

    @app.delete("/sessions/{sid}", status_code=204)
    def delete_session(sid: str):
        se = sessions.pop(sid, None)
        if se is None:
            return err(404, f"unknown session {sid}")

    if ui_dir is not None and Path(ui_dir).is_dir():
        app.mount("/", StaticFiles(directory=ui_dir, html=True), name="ui")
    else:
        @app.get("/")
        def index():
            return {"schema_version": SCHEMA_VERSION, "service": "imdskit",
                    "models": sorted(entries.keys()), "ui": None}
    return app


def default_ui_dir() -> Path | None:
    """The built frontend bundle, when the repo checkout carries one."""
    here = Path(__file__).resolve()
    candidates = [p / "frontend" / "dist" for p in here.parents]
    candidates.append(Path.cwd() / "frontend" / "dist")
    for candidate in candidates:
        if (candidate / "index.html").is_file():
            return candidate
    return None


def serve(target, bind: str = "127.0.0.1:8000",
          ui_dir: Path | None = None, limits: Limits = Limits()):
    import uvicorn

    models = load_models(model_paths(target), limits)
    app = create_app(models, ui_dir if ui_dir is not None else default_ui_dir())
    host, _, port = bind.partition(":")
    uvicorn.run(app, host=host or "127.0.0.1", port=int(port or 8000),
                log_level="info")
