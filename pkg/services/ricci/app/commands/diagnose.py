"""
diagnose: structure report for one graph, or a before/after comparison.
"""
import argparse
import logging

from services.ricci.app.diagnostics import compare, diagnose
from services.ricci.app.fileio import write_json, write_table
from services.ricci.app.schemas import DiagnosticsReport

from .common import frame_of, load, sibling

logger = logging.getLogger(__name__)

NAME = "diagnose"

HISTOGRAM_COLUMNS = ["graph", "bin_left", "bin_right", "count"]


def register(subparsers) -> None:
    parser = subparsers.add_parser(NAME, help="Effective resistance, curvature and degree diagnostics")
    parser.add_argument("before")
    parser.add_argument("after", nargs="?", default=None)
    parser.add_argument("--frame", type=int, default=0, help="Frame to diagnose in each input")
    parser.add_argument(
        "--skip-resistance",
        action="store_true",
        help="Leave total effective resistance empty instead of failing on disconnected graphs",
    )
    parser.add_argument(
        "--out",
        default="diagnostics.json",
        help="Report JSON; <stem>_histogram.csv is written beside it",
    )
    parser.set_defaults(handler=run)


def _histogram_rows(label: str, report: DiagnosticsReport):
    edges = report.curvature_histogram.bin_edges
    return [
        {"graph": label, "bin_left": edges[k], "bin_right": edges[k + 1], "count": count}
        for k, count in enumerate(report.curvature_histogram.counts)
    ]


def _describe(label: str, report: DiagnosticsReport) -> str:
    return (
        f"{label}: {report.node_count} nodes, {report.edge_count} edges, "
        f"total effective resistance {report.total_effective_resistance}, "
        f"min kappa {report.min_edge_curvature}"
    )


def run(args: argparse.Namespace) -> int:
    include_resistance = not args.skip_resistance
    before = frame_of(load(args.before), args.frame)

    if args.after is None:
        report = diagnose(before, include_resistance=include_resistance)
        print(_describe("graph", report))
        write_json(report, args.out)
        write_table(_histogram_rows("graph", report), HISTOGRAM_COLUMNS, sibling(args.out, "histogram"))
        return 0

    after = frame_of(load(args.after), args.frame)
    comparison = compare(before, after, include_resistance=include_resistance)
    print(_describe("before", comparison.before))
    print(_describe("after", comparison.after))
    delta = comparison.deltas.get("total_effective_resistance")
    if delta is not None:
        print(f"delta total effective resistance: {delta}")
    write_json(comparison, args.out)
    rows = _histogram_rows("before", comparison.before) + _histogram_rows("after", comparison.after)
    write_table(rows, HISTOGRAM_COLUMNS, sibling(args.out, "histogram"))
    return 0
