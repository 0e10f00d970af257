"""
Process-local counters and timing samples.

Counters record how often expensive computations run (the rewiring tests
assert on them); timing samples feed the bench harness medians.
"""
import logging
import statistics
import threading
import time
from contextlib import contextmanager
from typing import Dict, List, Optional

logger = logging.getLogger(__name__)

MAX_SAMPLES = 1000

_lock = threading.Lock()
_counts: Dict[str, int] = {}
_timings: Dict[str, List[float]] = {}


def increment_count(name: str, amount: int = 1) -> None:
    with _lock:
        _counts[name] = _counts.get(name, 0) + amount


def get_counts() -> Dict[str, int]:
    with _lock:
        return dict(_counts)


def reset_counts() -> None:
    with _lock:
        _counts.clear()


def record_timing(label: str, seconds: float) -> None:
    with _lock:
        samples = _timings.setdefault(label, [])
        samples.append(seconds)
        # Keep only last MAX_SAMPLES entries
        if len(samples) > MAX_SAMPLES:
            del samples[: len(samples) - MAX_SAMPLES]


def _percentile(sorted_values: List[float], fraction: float) -> float:
    index = min(int(len(sorted_values) * fraction), len(sorted_values) - 1)
    return sorted_values[index]


def get_timing_stats(label: Optional[str] = None) -> Dict[str, float]:
    """Summary of recorded samples for one label, or all labels pooled."""
    with _lock:
        if label is None:
            samples = [s for values in _timings.values() for s in values]
        else:
            samples = list(_timings.get(label, []))

    if not samples:
        return {
            "count": 0,
            "median": 0.0,
            "p50": 0.0,
            "p95": 0.0,
            "min": 0.0,
            "max": 0.0,
        }

    ordered = sorted(samples)
    return {
        "count": len(ordered),
        "median": statistics.median(ordered),
        "p50": _percentile(ordered, 0.50),
        "p95": _percentile(ordered, 0.95),
        "min": ordered[0],
        "max": ordered[-1],
    }


def reset_timings() -> None:
    with _lock:
        _timings.clear()


@contextmanager
def timed(label: str):
    """Record the wall time of the enclosed block under ``label``."""
    start = time.perf_counter()
    try:
        yield
    finally:
        elapsed = time.perf_counter() - start
        record_timing(label, elapsed)
        logger.debug("%8f secs for %s", elapsed, label)
