import pytest

from ballotree.core.tournament import Direction
from ballotree.core.verification import Verifier
from ballotree.utils import config as config_module


@pytest.fixture(autouse=True)
def isolated_config(tmp_path, monkeypatch):
    """Every test gets its own config dir and a fresh config singleton."""
    monkeypatch.setenv("BALLOTREE_CONFIG_DIR", str(tmp_path / "config"))
    monkeypatch.delenv("BALLOTREE_EXHAUSTIVE_LIMIT", raising=False)
    monkeypatch.setattr(config_module, "_config", None)
    yield


@pytest.fixture
def clockwise():
    return Direction.CLOCKWISE.tournament


@pytest.fixture
def counterclockwise():
    return Direction.COUNTERCLOCKWISE.tournament


@pytest.fixture
def verifier():
    """Single-process verifier with small chunks so chunk boundaries get exercised."""
    return Verifier(jobs=1, chunk_size=16, seed=0)
