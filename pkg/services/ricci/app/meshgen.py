"""
Synthetic triangulated channel meshes with an optional disk obstacle,
one level of refinement around it and an analytic potential-flow field.
"""
import logging
import math
from typing import Dict, List, Optional, Set, Tuple

import numpy as np

from .errors import UsageError
from .models import Cell, Edge, MeshGraph, NodeType, Trajectory, build_from_cells, canonical_edge
from .schemas import MeshSpec, Obstacle

logger = logging.getLogger(__name__)

FRAME_AMPLITUDE = 0.1


def potential_flow_velocity(points: np.ndarray, speed: float, obstacle: Optional[Obstacle]) -> np.ndarray:
    """Inviscid flow of free-stream speed ``speed`` past the disk; uniform without one."""
    points = np.asarray(points, dtype=np.float64).reshape(-1, 2)
    velocity = np.zeros_like(points)
    velocity[:, 0] = speed
    if obstacle is None:
        return velocity
    x = points[:, 0] - obstacle.center_x
    y = points[:, 1] - obstacle.center_y
    r4 = (x * x + y * y) ** 2
    scale = obstacle.radius ** 2 / r4
    velocity[:, 0] = speed * (1.0 - scale * (x * x - y * y))
    velocity[:, 1] = -2.0 * speed * scale * x * y
    return velocity


def bernoulli_pressure(velocity: np.ndarray, speed: float) -> np.ndarray:
    """p = U²/2 - ‖w‖²/2 at unit density."""
    return 0.5 * speed * speed - 0.5 * np.sum(velocity * velocity, axis=1)


def frame_speed(speed: float, frame: int, frames: int) -> float:
    return speed * (1.0 + FRAME_AMPLITUDE * math.sin(2.0 * math.pi * frame / frames))


def _structured_grid(spec: MeshSpec) -> Tuple[np.ndarray, List[Cell]]:
    x_min, x_max, y_min, y_max = spec.domain
    xs = np.linspace(x_min, x_max, spec.nx + 1)
    ys = np.linspace(y_min, y_max, spec.ny + 1)
    grid_x, grid_y = np.meshgrid(xs, ys)
    positions = np.column_stack([grid_x.ravel(), grid_y.ravel()])

    stride = spec.nx + 1
    cells: List[Cell] = []
    for j in range(spec.ny):
        for i in range(spec.nx):
            a = j * stride + i
            b, c = a + 1, a + stride
            d = c + 1
            # diagonal orientation alternates by row so interior nodes get six neighbours
            if j % 2 == 0:
                cells.extend([(a, b, d), (a, d, c)])
            else:
                cells.extend([(a, b, c), (b, d, c)])
    return positions, cells


def _cell_edges(cell: Cell) -> Tuple[Edge, Edge, Edge]:
    a, b, c = cell
    return canonical_edge(a, b), canonical_edge(b, c), canonical_edge(a, c)


def _project_to_circle(point: np.ndarray, obstacle: Obstacle) -> np.ndarray:
    center = np.array([obstacle.center_x, obstacle.center_y])
    offset = point - center
    return center + obstacle.radius * offset / np.linalg.norm(offset)


def _cut_obstacle(
    positions: np.ndarray, cells: List[Cell], obstacle: Obstacle
) -> Tuple[np.ndarray, List[Cell], Set[int]]:
    """Drop nodes inside the disk, snap the surrounding ring onto the circle."""
    center = np.array([obstacle.center_x, obstacle.center_y])
    inside = np.linalg.norm(positions - center, axis=1) < obstacle.radius

    ring: Set[int] = set()
    kept_cells: List[Cell] = []
    for cell in cells:
        flags = [inside[v] for v in cell]
        if any(flags):
            ring.update(v for v, flag in zip(cell, flags) if not flag)
        else:
            kept_cells.append(cell)

    used = sorted({v for cell in kept_cells for v in cell})
    mapping = {old: new for new, old in enumerate(used)}
    new_positions = positions[used].copy()
    new_ring = {mapping[v] for v in ring if v in mapping}
    for v in new_ring:
        new_positions[v] = _project_to_circle(new_positions[v], obstacle)
    new_cells = [tuple(mapping[v] for v in cell) for cell in kept_cells]
    return new_positions, new_cells, new_ring


def _refine(
    positions: np.ndarray,
    cells: List[Cell],
    ring: Set[int],
    obstacle: Obstacle,
    radius: float,
) -> Tuple[np.ndarray, List[Cell], Set[int]]:
    """Split cells near the obstacle into four; neighbours with one hanging node are bisected."""
    center = np.array([obstacle.center_x, obstacle.center_y])
    gap = np.linalg.norm(positions - center, axis=1) - obstacle.radius
    marked = {k for k, cell in enumerate(cells) if any(gap[v] <= radius for v in cell)}

    split: Set[Edge] = set()
    while True:
        for k in marked:
            split.update(_cell_edges(cells[k]))
        # closure: a cell with two or more split sides is split fully
        grown = {
            k for k, cell in enumerate(cells)
            if k not in marked and sum(e in split for e in _cell_edges(cell)) >= 2
        }
        if not grown:
            break
        marked |= grown

    edge_use: Dict[Edge, int] = {}
    for cell in cells:
        for e in _cell_edges(cell):
            edge_use[e] = edge_use.get(e, 0) + 1

    n = positions.shape[0]
    midpoint: Dict[Edge, int] = {}
    extra: List[np.ndarray] = []
    obstacle_nodes = set(ring)
    for e in sorted(split):
        point = 0.5 * (positions[e[0]] + positions[e[1]])
        on_hole = edge_use[e] == 1 and e[0] in ring and e[1] in ring
        if on_hole:
            point = _project_to_circle(point, obstacle)
            obstacle_nodes.add(n + len(extra))
        midpoint[e] = n + len(extra)
        extra.append(point)

    refined: List[Cell] = []
    for k, (a, b, c) in enumerate(cells):
        if k in marked:
            ab, bc, ca = midpoint[canonical_edge(a, b)], midpoint[canonical_edge(b, c)], midpoint[canonical_edge(a, c)]
            refined.extend([(a, ab, ca), (ab, b, bc), (ca, bc, c), (ab, bc, ca)])
            continue
        hanging = [
            (x, y, z)
            for x, y, z in ((a, b, c), (b, c, a), (c, a, b))
            if canonical_edge(x, y) in split
        ]
        if hanging:
            x, y, z = hanging[0]
            m = midpoint[canonical_edge(x, y)]
            refined.extend([(x, m, z), (m, y, z)])
        else:
            refined.append((a, b, c))

    if extra:
        positions = np.vstack([positions, np.asarray(extra)])
    return positions, refined, obstacle_nodes


def _node_types(positions: np.ndarray, spec: MeshSpec, obstacle_nodes: Set[int]) -> np.ndarray:
    x_min, x_max, y_min, y_max = spec.domain
    types = np.full(positions.shape[0], int(NodeType.INTERIOR), dtype=np.int64)
    x, y = positions[:, 0], positions[:, 1]
    types[x == x_max] = int(NodeType.OUTLET)
    types[x == x_min] = int(NodeType.INLET)
    types[(y == y_min) | (y == y_max)] = int(NodeType.WALL)
    if obstacle_nodes:
        types[sorted(obstacle_nodes)] = int(NodeType.OBSTACLE)
    return types


def generate(spec: MeshSpec) -> Trajectory:
    """Static-mesh trajectory of ``spec.frames`` frames over the generated mesh."""
    x_min, x_max, y_min, y_max = spec.domain
    obstacle = spec.obstacle
    if obstacle is not None:
        cx, cy, radius = obstacle.center_x, obstacle.center_y, obstacle.radius
        if not (x_min < cx - radius and cx + radius < x_max and y_min < cy - radius and cy + radius < y_max):
            raise UsageError("obstacle does not fit inside the domain")

    positions, cells = _structured_grid(spec)
    obstacle_nodes: Set[int] = set()
    if obstacle is not None:
        positions, cells, obstacle_nodes = _cut_obstacle(positions, cells, obstacle)
        if spec.refine_radius is not None:
            positions, cells, obstacle_nodes = _refine(
                positions, cells, obstacle_nodes, obstacle, spec.refine_radius
            )
    elif spec.refine_radius is not None:
        logger.warning("refine radius ignored: the mesh has no obstacle")

    if positions.shape[0] < 3 or not cells:
        raise UsageError("mesh generation left fewer than 3 nodes")

    node_type = _node_types(positions, spec, obstacle_nodes)
    first = build_from_cells(
        positions,
        cells,
        {"velocity": potential_flow_velocity(positions, spec.inflow_speed, obstacle), "node_type": node_type},
    )

    frames: List[MeshGraph] = []
    for k in range(spec.frames):
        speed = frame_speed(spec.inflow_speed, k, spec.frames)
        velocity = potential_flow_velocity(positions, speed, obstacle)
        frames.append(first.with_fields(velocity=velocity, pressure=bernoulli_pressure(velocity, speed)))

    logger.info(
        "generated %d nodes, %d edges, %d frames (time step %g)",
        first.node_count, first.edge_count, spec.frames, spec.time_step,
    )
    return Trajectory(frames=tuple(frames), static_mesh=True)
