"""
Graph data model: immutable mesh graphs and trajectories.

A MeshGraph stores one undirected record per node pair, canonically ordered
as (min, max), plus per-node geometry and physical fields. Every operation
that "changes" a graph returns a new instance.
"""
import logging
from dataclasses import dataclass, replace
from enum import IntEnum
from functools import cached_property
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

import networkx as nx
import numpy as np

from .errors import GraphError

logger = logging.getLogger(__name__)

Edge = Tuple[int, int]
Cell = Tuple[int, int, int]


class NodeType(IntEnum):
    """Boundary-condition class of a node."""
    INTERIOR = 0
    OBSTACLE = 1
    INLET = 4
    OUTLET = 5
    WALL = 6


def canonical_edge(i: int, j: int) -> Edge:
    return (i, j) if i < j else (j, i)


def _frozen_array(values, shape_tail: Tuple[int, ...], dtype, name: str, n: int) -> np.ndarray:
    array = np.array(values, dtype=dtype, copy=True)
    if array.size == 0 and n == 0:
        array = array.reshape((0,) + shape_tail)
    if array.shape != (n,) + shape_tail:
        raise GraphError(
            f"{name} has shape {array.shape}, expected {(n,) + shape_tail}"
        )
    if dtype is np.float64 and not np.all(np.isfinite(array)):
        raise GraphError(f"{name} contains non-finite values")
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class MeshGraph:
    positions: np.ndarray
    velocity: np.ndarray
    node_type: np.ndarray
    edges: Tuple[Edge, ...]
    pressure: Optional[np.ndarray] = None
    density: Optional[np.ndarray] = None
    cells: Optional[Tuple[Cell, ...]] = None

    def __post_init__(self):
        positions = np.asarray(self.positions, dtype=np.float64)
        n = positions.shape[0] if positions.ndim >= 1 else 0
        set_ = object.__setattr__
        set_(self, "positions", _frozen_array(positions, (2,), np.float64, "positions", n))
        set_(self, "velocity", _frozen_array(self.velocity, (2,), np.float64, "velocity", n))
        set_(self, "node_type", _frozen_array(self.node_type, (), np.int64, "node_type", n))
        if self.pressure is not None:
            set_(self, "pressure", _frozen_array(self.pressure, (), np.float64, "pressure", n))
        if self.density is not None:
            set_(self, "density", _frozen_array(self.density, (), np.float64, "density", n))

        edges = sorted({_checked_pair(i, j, n) for i, j in self.edges})
        set_(self, "edges", tuple(edges))

        if self.cells is not None:
            cells = tuple(_checked_cell(c, n) for c in self.cells)
            edge_set = set(edges)
            for a, b, c in cells:
                for pair in ((a, b), (b, c), (a, c)):
                    if canonical_edge(*pair) not in edge_set:
                        raise GraphError(f"cell ({a},{b},{c}) has an edge outside the edge set")
            set_(self, "cells", cells)

    @property
    def node_count(self) -> int:
        return int(self.positions.shape[0])

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    @cached_property
    def edge_set(self) -> frozenset:
        return frozenset(self.edges)

    @cached_property
    def neighbors(self) -> Tuple[Tuple[int, ...], ...]:
        """Sorted neighbour tuples, indexed by node."""
        adjacency: List[List[int]] = [[] for _ in range(self.node_count)]
        for i, j in self.edges:
            adjacency[i].append(j)
            adjacency[j].append(i)
        return tuple(tuple(sorted(a)) for a in adjacency)

    @cached_property
    def degrees(self) -> np.ndarray:
        values = np.fromiter((len(a) for a in self.neighbors), dtype=np.int64, count=self.node_count)
        values.setflags(write=False)
        return values

    @cached_property
    def nx_graph(self) -> nx.Graph:
        graph = nx.Graph()
        graph.add_nodes_from(range(self.node_count))
        graph.add_edges_from(self.edges)
        return graph

    def has_edge(self, i: int, j: int) -> bool:
        return canonical_edge(i, j) in self.edge_set

    def field(self, name: str) -> Optional[np.ndarray]:
        """Per-node physical field by name, or None when absent."""
        if name not in ("velocity", "pressure", "density"):
            raise GraphError(f"unknown field '{name}'")
        return getattr(self, name)

    def with_edges(self, edges: Iterable[Edge], cells: Optional[Sequence[Cell]] = None) -> "MeshGraph":
        return replace(self, edges=tuple(edges), cells=None if cells is None else tuple(cells))

    def with_fields(self, **fields) -> "MeshGraph":
        return replace(self, **fields)

    def equals(self, other: "MeshGraph") -> bool:
        """Value equality over topology, geometry and fields."""
        if not isinstance(other, MeshGraph):
            return False
        if self.edges != other.edges or self.cells != other.cells:
            return False
        for name in ("positions", "velocity", "node_type"):
            if not np.array_equal(getattr(self, name), getattr(other, name)):
                return False
        for name in ("pressure", "density"):
            mine, theirs = getattr(self, name), getattr(other, name)
            if (mine is None) != (theirs is None):
                return False
            if mine is not None and not np.array_equal(mine, theirs):
                return False
        return True


@dataclass(frozen=True, eq=False)
class Trajectory:
    frames: Tuple[MeshGraph, ...]
    static_mesh: bool = True

    def __post_init__(self):
        frames = tuple(self.frames)
        if not frames:
            raise GraphError("trajectory has no frames")
        if self.static_mesh:
            first = frames[0]
            for index, frame in enumerate(frames[1:], start=1):
                if frame.node_count != first.node_count or frame.edges != first.edges:
                    raise GraphError(f"frame {index} topology differs in a static-mesh trajectory")
        object.__setattr__(self, "frames", frames)

    def __len__(self) -> int:
        return len(self.frames)

    def equals(self, other: "Trajectory") -> bool:
        return (
            self.static_mesh == other.static_mesh
            and len(self.frames) == len(other.frames)
            and all(a.equals(b) for a, b in zip(self.frames, other.frames))
        )


def _checked_index(i, n: int) -> int:
    index = int(i)
    if index != i or index < 0 or index >= n:
        raise GraphError(f"node index {i} out of range for {n} nodes")
    return index


def _checked_pair(i, j, n: int) -> Edge:
    a, b = _checked_index(i, n), _checked_index(j, n)
    if a == b:
        raise GraphError(f"self-loop on node {a}")
    return canonical_edge(a, b)


def _checked_cell(cell, n: int) -> Cell:
    if len(cell) != 3:
        raise GraphError(f"cell {tuple(cell)} is not a triangle")
    a, b, c = (_checked_index(v, n) for v in cell)
    if a == b or b == c or a == c:
        raise GraphError(f"degenerate cell ({a},{b},{c})")
    return (a, b, c)


def _field_defaults(n: int, fields: Optional[Mapping[str, object]]) -> Dict[str, object]:
    fields = dict(fields or {})
    unknown = set(fields) - {"velocity", "pressure", "density", "node_type"}
    if unknown:
        raise GraphError(f"unknown fields: {', '.join(sorted(unknown))}")
    fields.setdefault("velocity", np.zeros((n, 2)))
    fields.setdefault("node_type", np.zeros(n, dtype=np.int64))
    return fields


def build_from_cells(positions, cells, fields: Optional[Mapping[str, object]] = None) -> MeshGraph:
    """Mesh graph whose edges are the deduplicated sides of ``cells``.

    Missing velocity defaults to zeros and missing node_type to interior.
    """
    positions = np.asarray(positions, dtype=np.float64).reshape(-1, 2)
    n = positions.shape[0]
    checked = [_checked_cell(c, n) for c in cells]
    edges = set()
    for a, b, c in checked:
        edges.add(canonical_edge(a, b))
        edges.add(canonical_edge(b, c))
        edges.add(canonical_edge(a, c))
    return MeshGraph(
        positions=positions,
        edges=tuple(sorted(edges)),
        cells=tuple(checked),
        **_field_defaults(n, fields),
    )


def build_from_edges(positions, edges, fields: Optional[Mapping[str, object]] = None) -> MeshGraph:
    """Graph with an explicit edge list and no cells."""
    positions = np.asarray(positions, dtype=np.float64).reshape(-1, 2)
    n = positions.shape[0]
    return MeshGraph(positions=positions, edges=tuple(edges), **_field_defaults(n, fields))


def bounded_bfs_distances(g: MeshGraph, source: int, radius: int) -> Dict[int, int]:
    """Exact hop distances from ``source`` for every node within ``radius``."""
    _checked_index(source, g.node_count)
    if radius < 0:
        raise GraphError(f"radius must be non-negative, got {radius}")
    return nx.single_source_shortest_path_length(g.nx_graph, source, cutoff=radius)


def degree(g: MeshGraph, i: int) -> int:
    return len(g.neighbors[_checked_index(i, g.node_count)])


def add_edges(g: MeshGraph, new_pairs: Iterable[Sequence[int]]) -> MeshGraph:
    """New graph with ``new_pairs`` inserted; present pairs and self-pairs are skipped."""
    n = g.node_count
    edges = set(g.edges)
    for pair in new_pairs:
        i, j = _checked_index(pair[0], n), _checked_index(pair[1], n)
        if i != j:
            edges.add(canonical_edge(i, j))
    if len(edges) == len(g.edges):
        return g
    return g.with_edges(sorted(edges), g.cells)


def remove_edges(g: MeshGraph, pairs: Iterable[Sequence[int]]) -> MeshGraph:
    """New graph without ``pairs``; absent pairs are skipped, cells losing a side are dropped."""
    n = g.node_count
    doomed = set()
    for pair in pairs:
        i, j = _checked_index(pair[0], n), _checked_index(pair[1], n)
        if i != j:
            doomed.add(canonical_edge(i, j))
    doomed &= g.edge_set
    if not doomed:
        return g
    cells = None
    if g.cells is not None:
        cells = [
            (a, b, c)
            for a, b, c in g.cells
            if not (
                canonical_edge(a, b) in doomed
                or canonical_edge(b, c) in doomed
                or canonical_edge(a, c) in doomed
            )
        ]
    return g.with_edges((e for e in g.edges if e not in doomed), cells)


def connected_components(g: MeshGraph) -> List[List[int]]:
    """Components as sorted node lists, ordered by their smallest node."""
    components = [sorted(c) for c in nx.connected_components(g.nx_graph)]
    components.sort(key=lambda c: c[0])
    return components


def is_connected(g: MeshGraph) -> bool:
    if g.node_count == 0:
        return True
    return len(connected_components(g)) == 1


def induced_subgraph(g: MeshGraph, nodes: Iterable[int]) -> Tuple[MeshGraph, Dict[int, int]]:
    """Subgraph on ``nodes`` (relabelled 0..k-1 in ascending order) and the old-to-new map."""
    kept = sorted(set(_checked_index(v, g.node_count) for v in nodes))
    mapping = {old: new for new, old in enumerate(kept)}
    index = np.array(kept, dtype=np.int64)
    edges = [
        (mapping[i], mapping[j])
        for i, j in g.edges
        if i in mapping and j in mapping
    ]
    sub = MeshGraph(
        positions=g.positions[index],
        velocity=g.velocity[index],
        node_type=g.node_type[index],
        edges=tuple(edges),
        pressure=None if g.pressure is None else g.pressure[index],
        density=None if g.density is None else g.density[index],
    )
    return sub, mapping
