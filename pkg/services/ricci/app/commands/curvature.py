"""
curvature: per-edge κ and per-node γ tables plus a JSON summary per frame.
"""
import argparse
import logging

from services.ricci.app.curvature import full_report
from services.ricci.app.errors import CurvatureError
from services.ricci.app.fileio import write_json, write_table
from services.ricci.app.schemas import CurvatureSummary

from .common import load, sibling

logger = logging.getLogger(__name__)

NAME = "curvature"

EDGE_COLUMNS = ["frame", "i", "j", "kappa"]
NODE_COLUMNS = ["frame", "i", "gamma"]


def register(subparsers) -> None:
    parser = subparsers.add_parser(NAME, help="Ollivier-Ricci curvature of every frame")
    parser.add_argument("input")
    parser.add_argument("--weighted", action="store_true", help="Velocity-difference edge lengths")
    parser.add_argument(
        "--out",
        default="curvature.json",
        help="Summary JSON; <stem>_edges.csv and <stem>_nodes.csv are written beside it",
    )
    parser.set_defaults(handler=run)


def run(args: argparse.Namespace) -> int:
    trajectory = load(args.input)
    summaries = []
    edge_rows = []
    node_rows = []
    for index, frame in enumerate(trajectory.frames):
        try:
            report = full_report(frame, weighted=args.weighted)
        except CurvatureError as e:
            raise CurvatureError(e.message, edge=e.edge, frame=index) from e
        summary = report.summary()
        summaries.append(
            CurvatureSummary(
                frame=index,
                weighted=args.weighted,
                node_count=frame.node_count,
                edge_count=frame.edge_count,
                **summary,
            )
        )
        edge_rows.extend(
            {"frame": index, "i": i, "j": j, "kappa": kappa}
            for (i, j), kappa in sorted(report.edge_curvature.items())
        )
        node_rows.extend(
            {"frame": index, "i": i, "gamma": gamma}
            for i, gamma in sorted(report.node_curvature.items())
        )
        print(f"frame {index}: {frame.edge_count} edges, min kappa {summary['min']}, mean kappa {summary['mean']}")

    write_json([s.model_dump(mode="json") for s in summaries], args.out)
    write_table(edge_rows, EDGE_COLUMNS, sibling(args.out, "edges"))
    write_table(node_rows, NODE_COLUMNS, sibling(args.out, "nodes"))
    logger.info("curvature written to %s", args.out)
    return 0
