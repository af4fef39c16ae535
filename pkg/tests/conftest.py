from pathlib import Path

import pytest

from imdskit import build_lts, parse_file

REPO = Path(__file__).resolve().parent.parent
MODELS = REPO / "models"


@pytest.fixture(scope="session")
def models_dir() -> Path:
    return MODELS


@pytest.fixture(scope="session")
def buffer_model():
    model, view = parse_file(MODELS / "buffer_server.imds")
    assert view == "server"
    return model


@pytest.fixture(scope="session")
def buffer_agent_model():
    model, view = parse_file(MODELS / "buffer_agent.imds")
    assert view == "agent"
    return model


@pytest.fixture(scope="session")
def crossed_model():
    model, _ = parse_file(MODELS / "crossed.imds")
    return model


@pytest.fixture(scope="session")
def buffer_lts(buffer_model):
    return build_lts(buffer_model)


@pytest.fixture(scope="session")
def crossed_lts(crossed_model):
    return build_lts(crossed_model)


@pytest.fixture(scope="session")
def corpus_models(buffer_model, crossed_model):
    return {"buffer": buffer_model, "crossed": crossed_model}
