import pytest

from gr2 import config
from gr2.symplectic_core import SymVector


@pytest.fixture
def h3():
    """Basis vectors of genus 3 keyed by name: h3['a1'], h3['b2'], ..."""
    return {name: SymVector.parse(name, 3) for name in ("a1", "b1", "a2", "b2", "a3", "b3")}


@pytest.fixture(autouse=True)
def single_thread(monkeypatch):
    monkeypatch.delenv(config.THREADS_ENV, raising=False)
    config.set_threads(None)
    yield
    config.set_threads(None)
