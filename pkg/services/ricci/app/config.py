import os

from dotenv import load_dotenv

load_dotenv()

# Log level for the CLI when no -v flag is given
LOG_LEVEL = os.getenv("RICCI_LOG_LEVEL", "WARNING")

# Node count above which effective resistance switches to per-pair solves
DENSE_RESISTANCE_LIMIT = int(os.getenv("RICCI_DENSE_RESISTANCE_LIMIT", "4000"))

# Inputs below this many edges are evaluated without a thread pool
PARALLEL_EDGE_THRESHOLD = 64


def thread_count() -> int:
    """Worker threads for curvature and per-frame rewiring (0 means one per CPU)."""
    requested = int(os.getenv("RICCI_THREADS", "0"))
    if requested <= 0:
        return os.cpu_count() or 1
    return requested


def default_budget_seconds():
    """Wall-time budget for iterative rewiring methods, or None when unset."""
    value = os.getenv("RICCI_BUDGET_SECONDS")
    if value is None or value.strip() == "":
        return None
    return float(value)
