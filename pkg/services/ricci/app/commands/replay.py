"""
replay: apply a recorded edit log to the trajectory it was made from.
"""
import argparse

from services.ricci.app.errors import GraphError
from services.ricci.app.fileio import read_edit_log, write_trajectory
from services.worker.worker_app.results import apply_edits

from .common import load, rebuilt_trajectory

NAME = "replay"


def register(subparsers) -> None:
    parser = subparsers.add_parser(NAME, help="Re-apply an edit log to its input trajectory")
    parser.add_argument("input")
    parser.add_argument("--log", required=True, help="Edit log written by rewire")
    parser.add_argument("-o", "--output", required=True)
    parser.set_defaults(handler=run)


def run(args: argparse.Namespace) -> int:
    trajectory = load(args.input)
    log = read_edit_log(args.log)
    if sorted(f.frame for f in log.frames) != list(range(len(trajectory))):
        raise GraphError(f"edit log frames do not match the {len(trajectory)} frames of {args.input}")

    graphs = []
    for edits in sorted(log.frames, key=lambda f: f.frame):
        graphs.append(apply_edits(trajectory.frames[edits.frame], edits.removed, edits.added))
        print(f"frame {edits.frame}: +{len(edits.added)} -{len(edits.removed)}")

    write_trajectory(rebuilt_trajectory(trajectory, graphs), args.output)
    return 0
