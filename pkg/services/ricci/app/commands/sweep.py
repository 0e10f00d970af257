"""
sweep: structural effect of the pooling ratio on one frame.
"""
import argparse
import logging

from services.ricci.app.curvature import full_report
from services.ricci.app.diagnostics import total_effective_resistance
from services.ricci.app.fileio import write_table
from services.worker.worker_app.tasks_piorf import piorf

from .common import add_rewire_flags, config_from_args, float_list, frame_of, load

logger = logging.getLogger(__name__)

NAME = "sweep"

COLUMNS = ["delta", "edges_added", "total_effective_resistance", "min_edge_curvature", "p01_edge_curvature"]
DEFAULT_DELTAS = "0.01,0.02,0.03,0.05,0.1"


def register(subparsers) -> None:
    parser = subparsers.add_parser(NAME, help="PIORF over a range of pooling ratios")
    parser.add_argument("input")
    parser.add_argument("--deltas", type=float_list, default=float_list(DEFAULT_DELTAS))
    parser.add_argument("--frame", type=int, default=0)
    parser.add_argument("--skip-resistance", action="store_true")
    parser.add_argument("--out", default="sweep.csv")
    add_rewire_flags(parser, with_method=False)
    parser.set_defaults(handler=run)


def run(args: argparse.Namespace) -> int:
    g = frame_of(load(args.input), args.frame)
    configs = [config_from_args(args, pooling_ratio=delta) for delta in args.deltas]

    rows = []
    for cfg in configs:
        result = piorf(g, cfg)
        summary = full_report(result.graph, weighted=cfg.weighted).summary()
        resistance = None if args.skip_resistance else total_effective_resistance(result.graph)
        rows.append(
            {
                "delta": cfg.pooling_ratio,
                "edges_added": len(result.added),
                "total_effective_resistance": resistance,
                "min_edge_curvature": summary["min"],
                "p01_edge_curvature": summary["p01"],
            }
        )
        print(f"delta {cfg.pooling_ratio}: +{len(result.added)} edges, resistance {resistance}")

    write_table(rows, COLUMNS, args.out)
    return 0
