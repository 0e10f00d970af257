"""
rewire: run PIORF or a baseline over a trajectory and write the rewired
trajectory together with a replayable edit log.
"""
import argparse
import logging

from services.ricci.app.fileio import write_edit_log, write_trajectory
from services.ricci.app.schemas import EditLogDocument, TrajectoryMode
from services.worker.worker_app.tasks_trajectory import rewire_trajectory

from .common import add_mode_flag, add_rewire_flags, config_from_args, load, rebuilt_trajectory

logger = logging.getLogger(__name__)

NAME = "rewire"


def register(subparsers) -> None:
    parser = subparsers.add_parser(NAME, help="Rewire every frame of a trajectory")
    parser.add_argument("input")
    add_rewire_flags(parser)
    add_mode_flag(parser)
    parser.add_argument("-o", "--output", required=True, help="Rewired trajectory (mgj)")
    parser.add_argument("--log", required=True, help="Edit log (JSON)")
    parser.add_argument("--no-timings", action="store_true", help="Write 0.0 for every timing in the edit log")
    parser.set_defaults(handler=run)


def run(args: argparse.Namespace) -> int:
    cfg = config_from_args(args)
    mode = TrajectoryMode(args.mode)
    trajectory = load(args.input)

    results = rewire_trajectory(trajectory, cfg, mode)
    frames = []
    for index, result in enumerate(results):
        print(
            f"frame {index}: +{len(result.added)} -{len(result.removed)} "
            f"{result.stats.get('seconds', 0.0):.6f}s"
        )
        if result.stats.get("timed_out"):
            logger.warning("frame %d: %s stopped on its time budget", index, cfg.method.value)
        if args.no_timings:
            result.stats["seconds"] = 0.0
        frames.append(result.to_frame_edits(index))

    rewired = rebuilt_trajectory(trajectory, [r.graph for r in results])
    write_trajectory(rewired, args.output)
    write_edit_log(EditLogDocument(method=cfg.method, mode=mode, config=cfg, frames=frames), args.log)
    return 0

