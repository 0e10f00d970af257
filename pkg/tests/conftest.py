"""
Pytest configuration and fixtures
"""
import math

import numpy as np
import pytest

from services.ricci.app import metrics
from services.ricci.app.models import MeshGraph, build_from_cells, build_from_edges


def circle_positions(n: int) -> np.ndarray:
    angles = np.linspace(0.0, 2.0 * math.pi, n, endpoint=False)
    return np.column_stack([np.cos(angles), np.sin(angles)])


def path_graph(n: int, **fields) -> MeshGraph:
    positions = np.column_stack([np.arange(n, dtype=float), np.zeros(n)])
    return build_from_edges(positions, [(k, k + 1) for k in range(n - 1)], fields or None)


def cycle_graph(n: int, **fields) -> MeshGraph:
    edges = [(k, (k + 1) % n) for k in range(n)]
    return build_from_edges(circle_positions(n), edges, fields or None)


def complete_graph(n: int, **fields) -> MeshGraph:
    edges = [(i, j) for i in range(n) for j in range(i + 1, n)]
    return build_from_edges(circle_positions(n), edges, fields or None)


def star_graph(leaves: int, **fields) -> MeshGraph:
    positions = np.vstack([[0.0, 0.0], circle_positions(leaves)])
    return build_from_edges(positions, [(0, k) for k in range(1, leaves + 1)], fields or None)


def barbell_graph() -> MeshGraph:
    """Two triangles {0,1,2} and {3,4,5} joined by the bridge (2,3)."""
    positions = [[0, 0], [0, 1], [1, 0.5], [2, 0.5], [3, 0], [3, 1]]
    edges = [(0, 1), (0, 2), (1, 2), (2, 3), (3, 4), (3, 5), (4, 5)]
    return build_from_edges(positions, edges)


def triangle_mesh() -> MeshGraph:
    return build_from_cells([[0, 0], [1, 0], [0, 1]], [(0, 1, 2)])


def random_connected_graph(rng: np.random.Generator, n: int, extra: int) -> MeshGraph:
    """Random spanning tree plus ``extra`` random chords."""
    edges = {(int(rng.integers(k)), k) for k in range(1, n)}
    for _ in range(extra):
        i, j = rng.choice(n, size=2, replace=False)
        edges.add((int(min(i, j)), int(max(i, j))))
    positions = rng.random((n, 2))
    return build_from_edges(positions, sorted(edges))


@pytest.fixture
def p4_graph():
    """Path 0-1-2-3 with velocities (0,0), (1,0), (2,0), (5,0)."""
    velocity = np.array([[0.0, 0.0], [1.0, 0.0], [2.0, 0.0], [5.0, 0.0]])
    return path_graph(4, velocity=velocity)


@pytest.fixture
def barbell():
    return barbell_graph()


@pytest.fixture(autouse=True)
def clean_metrics():
    """Reset process-local counters and timings around every test"""
    metrics.reset_counts()
    metrics.reset_timings()
    yield
    metrics.reset_counts()
    metrics.reset_timings()
