"""
In-memory memo of ground-metric balls for one graph.

Hop mode stores bounded BFS balls of radius 3; velocity-weighted mode stores
Dijkstra balls cut off at the longest three-edge walk leaving each node, which
covers every support pair an incident edge can ask for.
"""
import logging
import threading
from typing import Dict, Optional

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import dijkstra

from .models import MeshGraph, bounded_bfs_distances

logger = logging.getLogger(__name__)

GROUND_RADIUS = 3
EDGE_LENGTH_EPSILON = 1e-9


def velocity_edge_lengths(g: MeshGraph) -> np.ndarray:
    """‖w_u − w_v‖ + EDGE_LENGTH_EPSILON for every edge, in edge order."""
    if not g.edges:
        return np.zeros(0)
    pairs = np.asarray(g.edges, dtype=np.int64)
    diff = g.velocity[pairs[:, 0]] - g.velocity[pairs[:, 1]]
    return np.linalg.norm(diff, axis=1) + EDGE_LENGTH_EPSILON


class DistanceCache:
    def __init__(self, g: MeshGraph, weighted: bool = False):
        self.graph = g
        self.weighted = weighted
        self._balls: Dict[int, Dict[int, float]] = {}
        self._lock = threading.Lock()
        self._stats = {"hits": 0, "misses": 0}
        self._matrix: Optional[csr_matrix] = None
        self._limits: Optional[np.ndarray] = None
        if weighted:
            self._prepare_weighted()

    def _prepare_weighted(self) -> None:
        g = self.graph
        n = g.node_count
        lengths = velocity_edge_lengths(g)
        if g.edges:
            pairs = np.asarray(g.edges, dtype=np.int64)
            rows = np.concatenate([pairs[:, 0], pairs[:, 1]])
            cols = np.concatenate([pairs[:, 1], pairs[:, 0]])
            data = np.concatenate([lengths, lengths])
        else:
            rows = cols = np.zeros(0, dtype=np.int64)
            data = np.zeros(0)
        self._matrix = csr_matrix((data, (rows, cols)), shape=(n, n))

        # longest walk of 1, 2 and 3 edges starting at each node
        reach = np.zeros(n)
        for _ in range(GROUND_RADIUS):
            extended = np.zeros(n)
            for (i, j), length in zip(g.edges, lengths):
                extended[i] = max(extended[i], length + reach[j])
                extended[j] = max(extended[j], length + reach[i])
            reach = extended
        self._limits = reach * (1.0 + 1e-9) + 1e-12

    def ball(self, source: int) -> Dict[int, float]:
        """Ground distances from ``source`` to every node the metric may query."""
        with self._lock:
            cached = self._balls.get(source)
            if cached is not None:
                self._stats["hits"] += 1
                return cached
            self._stats["misses"] += 1

        if self.weighted:
            row = dijkstra(self._matrix, directed=False, indices=source, limit=self._limits[source])
            reached = np.flatnonzero(np.isfinite(row))
            ball = {int(v): float(row[v]) for v in reached}
        else:
            ball = {v: float(d) for v, d in bounded_bfs_distances(self.graph, source, GROUND_RADIUS).items()}

        with self._lock:
            self._balls[source] = ball
        return ball

    def distance(self, p: int, q: int) -> float:
        return self.ball(p).get(q, float("inf"))

    def get_stats(self) -> dict:
        with self._lock:
            hits, misses = self._stats["hits"], self._stats["misses"]
        total = hits + misses
        hit_rate = (hits / total * 100) if total > 0 else 0
        return {
            "hits": hits,
            "misses": misses,
            "total": total,
            "hit_rate": round(hit_rate, 2),
        }
