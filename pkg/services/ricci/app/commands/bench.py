"""
bench: wall time of each rewiring method against the number of edges it is
allowed to add.

Every method is driven by its own budget knob so the x-axis is shared:
PIORF through the pooling ratio, SDRF and FoSR through their iteration
count, BORF through the number of add-only batches. DIGL thresholds a
diffusion matrix and cannot be held to an edge count, so it is skipped.
"""
import argparse
import logging
import math

from services.ricci.app.errors import UsageError
from services.ricci.app.fileio import write_table
from services.ricci.app.metrics import get_timing_stats, reset_timings, timed
from services.ricci.app.models import MeshGraph
from services.ricci.app.schemas import RewireConfig, RewireMethod
from services.worker.worker_app.tasks_trajectory import rewire

from .common import frame_of, int_list, load, name_list

logger = logging.getLogger(__name__)

NAME = "bench"

COLUMNS = ["method", "edges_added", "seconds"]
DEFAULT_METHODS = "piorf,sdrf,fosr,borf"
DEFAULT_EDGE_COUNTS = "16,32,64,128,256"
BORF_ADD_PER_BATCH = 4


def register(subparsers) -> None:
    parser = subparsers.add_parser(NAME, help="Time the rewiring methods against edges added")
    parser.add_argument("input")
    parser.add_argument("--methods", type=name_list, default=name_list(DEFAULT_METHODS))
    parser.add_argument("--edge-counts", type=int_list, default=int_list(DEFAULT_EDGE_COUNTS))
    parser.add_argument("--repeats", type=int, default=3, help="Runs per point; the median is reported")
    parser.add_argument("--frame", type=int, default=0)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--out", default="timings.csv")
    parser.set_defaults(handler=run)


def budget_config(method: RewireMethod, edges: int, node_count: int, seed: int = 0) -> RewireConfig:
    """Configuration that lets ``method`` add ``edges`` edges."""
    if method == RewireMethod.PIORF:
        return RewireConfig(method=method, pooling_ratio=(edges + 0.5) / node_count, seed=seed)
    if method in (RewireMethod.SDRF, RewireMethod.FOSR):
        return RewireConfig(method=method, method_params={"max_iterations": edges}, seed=seed)
    if method == RewireMethod.BORF:
        params = {
            "batches": math.ceil(edges / BORF_ADD_PER_BATCH),
            "add_per_batch": BORF_ADD_PER_BATCH,
            "remove_per_batch": 0,
        }
        return RewireConfig(method=method, method_params=params, seed=seed)
    raise UsageError(f"{method.value} has no edge-count budget")


def _methods(names) -> list:
    methods = []
    for name in names:
        try:
            method = RewireMethod(name)
        except ValueError:
            raise UsageError(f"invalid --methods: unknown method {name!r}")
        if method == RewireMethod.DIGL:
            logger.warning("digl excluded from bench: its threshold does not budget edge counts")
            continue
        methods.append(method)
    return methods


def time_point(g: MeshGraph, cfg: RewireConfig, repeats: int, label: str) -> float:
    for _ in range(repeats):
        with timed(label):
            rewire(g, cfg)
    return get_timing_stats(label)["median"]


def run(args: argparse.Namespace) -> int:
    methods = _methods(args.methods)
    if args.repeats < 1:
        raise UsageError("invalid --repeats: must be at least 1")
    counts = [k for k in args.edge_counts if k > 0]
    if len(counts) != len(args.edge_counts):
        raise UsageError("invalid --edge-counts: counts must be positive")
    g = frame_of(load(args.input), args.frame)

    reset_timings()
    rows = []
    for method in methods:
        for edges in counts:
            if method == RewireMethod.PIORF and edges >= g.node_count:
                logger.warning("piorf cannot add %d edges on %d nodes; point skipped", edges, g.node_count)
                continue
            cfg = budget_config(method, edges, g.node_count, seed=args.seed)
            seconds = time_point(g, cfg, args.repeats, f"{method.value}:{edges}")
            rows.append({"method": method.value, "edges_added": edges, "seconds": seconds})
            print(f"{method.value} {edges}: {seconds:.6f}s")

    write_table(rows, COLUMNS, args.out)
    return 0
