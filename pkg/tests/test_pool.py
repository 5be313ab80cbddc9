import threading

import pytest

from proxcvx.pool import THREADS_ENV, _WorkerPool, threads_from_env


@pytest.mark.parametrize("threads", [0, 1, 4])
def test_map_keeps_submission_order(threads):
    """
    Results come back in submission order whatever the thread count.
    """
    pool = _WorkerPool(threads)
    assert pool._map(lambda v: v * v, range(20)) == [v * v for v in range(20)]


def test_sequential_map_runs_in_calling_thread():
    """
    threads=0 runs every unit in the calling thread.
    """
    seen = set()

    def record(_):
        seen.add(threading.get_ident())
        return True

    _WorkerPool(0)._map(record, range(4))
    assert seen == {threading.get_ident()}


def test_threaded_map_propagates_errors():
    """
    An exception in a worker reaches the caller.
    """
    def fail(v):
        if v == 2:
            raise ValueError("unit 2")
        return v

    with pytest.raises(ValueError, match="unit 2"):
        _WorkerPool(3)._map(fail, range(5))


@pytest.mark.parametrize("raw, expected", [
    (None, 0),
    ("", 0),
    ("3", 3),
    ("-2", 0),
    ("many", 0),
])
def test_threads_from_env(monkeypatch, raw, expected):
    """
    Invalid or negative thread counts fall back to 0.
    """
    if raw is None:
        monkeypatch.delenv(THREADS_ENV, raising=False)
    else:
        monkeypatch.setenv(THREADS_ENV, raw)
    assert threads_from_env() == expected
