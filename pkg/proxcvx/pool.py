import logging
import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, List, TypeVar

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")

THREADS_ENV = "PROXCVX_THREADS"


def threads_from_env(default: int = 0) -> int:
    """Read the worker cap from ``PROXCVX_THREADS`` (0 means sequential)."""
    raw = os.environ.get(THREADS_ENV)
    if raw is None or raw.strip() == "":
        return default
    try:
        value = int(raw)
    except ValueError:
        logger.warning("ignoring non-integer %s=%r", THREADS_ENV, raw)
        return default
    return max(0, value)


class _WorkerPool:
    """Run independent work units and hand back results in submission order.

    The reduction callers perform afterwards walks the returned list by index,
    so results never depend on how the units were scheduled.

    Parameters
    ----------
    threads : int
        Maximum number of worker threads. ``0`` or ``1`` runs the units
        sequentially in the calling thread.
    """

    def __init__(self, threads: int = 0):
        self._threads = max(0, int(threads))

    def _map(self, func: Callable[[T], R], items: Iterable[T]) -> List[R]:
        """Apply `func` to every item.

        Parameters
        ----------
        func : Callable
            Pure function evaluated once per item.
        items : iterable
            Work units.

        Returns
        -------
        list
            ``[func(item) for item in items]``, index-ordered.
        """
        units = list(items)
        if self._threads <= 1 or len(units) <= 1:
            return [func(u) for u in units]
        with ThreadPoolExecutor(max_workers=self._threads) as executor:
            return list(executor.map(func, units))
