import pytest

from gr2 import config
from gr2.workers import chunked, parallel_map


def test_defaults():
    assert config.default_genus() == 3
    assert config.default_format() == "text"
    assert config.schema_version() == 1


def test_thread_precedence(monkeypatch):
    assert config.thread_count() == 1
    monkeypatch.setenv(config.THREADS_ENV, "3")
    assert config.thread_count() == 3
    config.set_threads(2)
    assert config.thread_count() == 2
    config.set_threads(None)
    assert config.thread_count() == 3


def test_invalid_environment_value_falls_back(monkeypatch):
    monkeypatch.setenv(config.THREADS_ENV, "many")
    assert config.thread_count() == 1
    with pytest.raises(ValueError):
        config.set_threads(0)


def test_parallel_map_keeps_order():
    items = list(range(50))
    assert parallel_map(lambda x: x * x, items, threads=4) == [x * x for x in items]
    assert chunked(range(5), 2) == [[0, 1], [2, 3], [4]]
