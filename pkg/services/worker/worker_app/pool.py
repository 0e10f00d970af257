"""
Execution settings for rewiring jobs: thread pool sizing and wall-time budgets.
"""
import logging
import time
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, List, Optional, Sequence, TypeVar

from services.ricci.app import config

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")


def worker_count(jobs: int) -> int:
    return max(1, min(config.thread_count(), jobs))


def map_ordered(fn: Callable[[T], R], items: Sequence[T]) -> List[R]:
    """Apply ``fn`` to every item; results follow input order whatever the completion order."""
    workers = worker_count(len(items))
    if workers <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as executor:
        return list(executor.map(fn, items))


class Budget:
    """Wall-time allowance for an iterative rewiring method."""

    def __init__(self, seconds: Optional[float] = None):
        self.seconds = seconds if seconds is not None else config.default_budget_seconds()
        self.start = time.perf_counter()

    def elapsed(self) -> float:
        return time.perf_counter() - self.start

    def exceeded(self) -> bool:
        return self.seconds is not None and self.elapsed() > self.seconds
