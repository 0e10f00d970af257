"""
gen: synthetic cylinder-flow meshes written as mgj trajectories.
"""
import argparse

from pydantic import ValidationError

from services.ricci.app.errors import UsageError
from services.ricci.app.fileio import write_trajectory
from services.ricci.app.meshgen import generate
from services.ricci.app.schemas import MeshSpec, Obstacle

from .common import float_list, usage_from_validation

NAME = "gen"

MESH_FLAGS = {
    "nx": "--nx",
    "ny": "--ny",
    "domain": "--domain",
    "obstacle": "--obstacle",
    "center_x": "--obstacle",
    "center_y": "--obstacle",
    "radius": "--obstacle",
    "refine_radius": "--refine",
    "inflow_speed": "--inflow-speed",
    "frames": "--frames",
    "time_step": "--time-step",
}


def register(subparsers) -> None:
    parser = subparsers.add_parser(NAME, help="Generate a triangulated channel mesh with potential-flow fields")
    parser.add_argument("--nx", type=int, default=40, help="Cells along x")
    parser.add_argument("--ny", type=int, default=16, help="Cells along y")
    parser.add_argument("--domain", type=float_list, default=None, metavar="XMIN,XMAX,YMIN,YMAX")
    parser.add_argument("--obstacle", type=float_list, default=None, metavar="CX,CY,R")
    parser.add_argument("--refine", type=float, default=None, help="Refinement radius around the obstacle")
    parser.add_argument("--inflow-speed", type=float, default=1.0)
    parser.add_argument("--frames", type=int, default=1)
    parser.add_argument("--time-step", type=float, default=0.01)
    parser.add_argument("-o", "--output", required=True)
    parser.set_defaults(handler=run)


def spec_from_args(args: argparse.Namespace) -> MeshSpec:
    values = {
        "nx": args.nx,
        "ny": args.ny,
        "refine_radius": args.refine,
        "inflow_speed": args.inflow_speed,
        "frames": args.frames,
        "time_step": args.time_step,
    }
    try:
        if args.domain is not None:
            values["domain"] = tuple(args.domain)
        if args.obstacle is not None:
            if len(args.obstacle) != 3:
                raise UsageError("invalid --obstacle: expected CX,CY,R")
            cx, cy, radius = args.obstacle
            values["obstacle"] = Obstacle(center_x=cx, center_y=cy, radius=radius)
        return MeshSpec(**values)
    except ValidationError as e:
        raise usage_from_validation(e, MESH_FLAGS) from e


def run(args: argparse.Namespace) -> int:
    spec = spec_from_args(args)
    trajectory = generate(spec)
    write_trajectory(trajectory, args.output)
    first = trajectory.frames[0]
    print(f"{args.output}: {len(trajectory)} frames, {first.node_count} nodes, {first.edge_count} edges")
    return 0
