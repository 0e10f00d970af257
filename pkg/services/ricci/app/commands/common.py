"""
Flag groups and helpers shared by the subcommands.
"""
import argparse
import logging
from pathlib import Path
from typing import Dict, List, Sequence, Union

from pydantic import ValidationError

from services.ricci.app.errors import UsageError
from services.ricci.app.fileio import read_trajectory
from services.ricci.app.models import MeshGraph, Trajectory
from services.ricci.app.schemas import (
    EdgeDirection,
    FormerSelector,
    LatterSelector,
    RewireAction,
    RewireConfig,
    RewireMethod,
    TrajectoryMode,
)

logger = logging.getLogger(__name__)

# config field -> flag that sets it
REWIRE_FLAGS = {
    "method": "--method",
    "pooling_ratio": "--delta",
    "former_selector": "--former",
    "latter_selector": "--latter",
    "action": "--action",
    "direction": "--direction",
    "weighted": "--weighted",
    "seed": "--seed",
    "method_params": "--param",
    "budget_seconds": "--budget-seconds",
}


def _choices(enum) -> List[str]:
    return [member.value for member in enum]


def float_list(text: str) -> List[float]:
    """Comma-separated floats; an empty string is an empty list."""
    try:
        return [float(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def int_list(text: str) -> List[int]:
    try:
        return [int(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def name_list(text: str) -> List[str]:
    return [part.strip() for part in text.split(",") if part.strip()]


def add_rewire_flags(parser: argparse.ArgumentParser, with_method: bool = True) -> None:
    """Flags mirroring RewireConfig; defaults reproduce plain PIORF."""
    group = parser.add_argument_group("rewiring")
    if with_method:
        group.add_argument("--method", choices=_choices(RewireMethod), default=RewireMethod.PIORF.value)
    group.add_argument("--delta", type=float, default=0.03, help="Pooling ratio (share of nodes used as sources)")
    group.add_argument("--former", choices=_choices(FormerSelector), default=FormerSelector.ORC.value)
    group.add_argument("--latter", choices=_choices(LatterSelector), default=LatterSelector.VELOCITY.value)
    group.add_argument("--action", choices=_choices(RewireAction), default=RewireAction.ADD.value)
    group.add_argument("--direction", choices=_choices(EdgeDirection), default=EdgeDirection.BIDIRECTIONAL.value)
    group.add_argument("--weighted", action="store_true", help="Velocity-difference edge lengths in the curvature")
    group.add_argument("--seed", type=int, default=0)
    group.add_argument(
        "--param",
        action="append",
        default=[],
        metavar="KEY=VALUE",
        help="Baseline hyperparameter, e.g. --param batches=4 (repeatable)",
    )
    group.add_argument("--budget-seconds", type=float, default=None, help="Wall-time budget for iterative methods")


def parse_params(pairs: Sequence[str]) -> Dict[str, Union[int, float]]:
    params: Dict[str, Union[int, float]] = {}
    for pair in pairs:
        key, sep, value = pair.partition("=")
        if not sep or not key:
            raise UsageError(f"--param expects KEY=VALUE, got {pair!r}")
        try:
            params[key] = int(value)
        except ValueError:
            try:
                params[key] = float(value)
            except ValueError:
                raise UsageError(f"--param {key}: {value!r} is not a number")
    return params


def usage_from_validation(e: ValidationError, flags: Dict[str, str]) -> UsageError:
    """One-line UsageError naming the flag behind the first failing field."""
    first = e.errors()[0]
    location = first.get("loc") or ()
    field = str(location[0]) if location else ""
    flag = flags.get(field)
    if flag is None:
        # model-level validators report no location; find the field in the message
        names = sorted(flags, key=len, reverse=True)
        flag = next((flags[name] for name in names if name in first.get("msg", "")), "arguments")
    return UsageError(f"invalid {flag}: {first.get('msg')}")


def config_from_args(args: argparse.Namespace, **overrides) -> RewireConfig:
    values = {
        "method": getattr(args, "method", RewireMethod.PIORF.value),
        "pooling_ratio": args.delta,
        "former_selector": args.former,
        "latter_selector": args.latter,
        "action": args.action,
        "direction": args.direction,
        "weighted": args.weighted,
        "seed": args.seed,
        "method_params": parse_params(args.param),
        "budget_seconds": args.budget_seconds,
    }
    values.update(overrides)
    try:
        return RewireConfig(**values)
    except ValidationError as e:
        raise usage_from_validation(e, REWIRE_FLAGS) from e


def add_mode_flag(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--mode", choices=_choices(TrajectoryMode), default=TrajectoryMode.PER_FRAME.value)


def load(path: str) -> Trajectory:
    if not Path(path).is_file():
        raise UsageError(f"input file not found: {path}")
    trajectory = read_trajectory(path)
    logger.info("read %d frames from %s", len(trajectory), path)
    return trajectory


def frame_of(t: Trajectory, index: int):
    if not 0 <= index < len(t):
        raise UsageError(f"--frame {index} out of range for {len(t)} frames")
    return t.frames[index]


def sibling(path: str, suffix: str) -> Path:
    """report.json -> report_<suffix>.csv next to it."""
    base = Path(path)
    return base.with_name(f"{base.stem}_{suffix}.csv")


def rebuilt_trajectory(original: Trajectory, graphs: Sequence[MeshGraph]) -> Trajectory:
    """Edited frames; the static flag survives only while every frame keeps one edge set."""
    static = original.static_mesh and all(g.edges == graphs[0].edges for g in graphs[1:])
    return Trajectory(frames=tuple(graphs), static_mesh=static)
