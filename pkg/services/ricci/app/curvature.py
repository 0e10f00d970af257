"""
Ollivier-Ricci curvature on mesh graphs.

Edge curvature is κ(i, j) = 1 - W1(m_i, m_j) / d(i, j), where m_i is the
non-lazy uniform random walk on the neighbours of i and W1 is solved exactly
with the network simplex in POT. Node curvature γ_i is the mean κ over the
edges incident to i. The Forman alternative 4 - deg(i) - deg(j) lives here
as well.
"""
import logging
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np
import ot

from . import config
from .cache import DistanceCache
from .errors import CurvatureError, GraphError
from .metrics import increment_count
from .models import Edge, MeshGraph, add_edges, bounded_bfs_distances, canonical_edge, induced_subgraph

logger = logging.getLogger(__name__)

GroundMetric = Callable[[int, int], float]

MASS_TOLERANCE = 1e-12


@dataclass(frozen=True)
class LocalMeasure:
    support: Tuple[int, ...]
    mass: Tuple[float, ...]

    def __post_init__(self):
        support = tuple(int(v) for v in self.support)
        mass = tuple(float(m) for m in self.mass)
        if len(support) != len(mass):
            raise GraphError("support and mass lengths differ")
        if not support:
            raise GraphError("measure has empty support")
        if len(set(support)) != len(support):
            raise GraphError("measure support nodes must be distinct")
        if any(m < 0 for m in mass):
            raise GraphError("measure masses must be non-negative")
        if abs(sum(mass) - 1.0) > MASS_TOLERANCE:
            raise GraphError(f"measure masses sum to {sum(mass)!r}, expected 1")
        object.__setattr__(self, "support", support)
        object.__setattr__(self, "mass", mass)

    def as_dict(self) -> Dict[int, float]:
        return dict(zip(self.support, self.mass))


@dataclass(frozen=True)
class TransportPlan:
    """Optimal coupling between two measures and its cost."""
    cost: float
    source_support: Tuple[int, ...]
    target_support: Tuple[int, ...]
    plan: np.ndarray

    def mass_between(self, p: int, q: int) -> float:
        try:
            a = self.source_support.index(p)
            b = self.target_support.index(q)
        except ValueError:
            return 0.0
        return float(self.plan[a, b])


@dataclass
class CurvatureReport:
    edge_curvature: Dict[Edge, float]
    node_curvature: Dict[int, float]
    weighted: bool = False
    transport_plans: Dict[Edge, TransportPlan] = field(default_factory=dict, repr=False)

    def edge_values(self) -> np.ndarray:
        return np.fromiter(self.edge_curvature.values(), dtype=np.float64, count=len(self.edge_curvature))

    def summary(self) -> Dict[str, Optional[float]]:
        """Minimum, 1st percentile and mean of the edge curvatures."""
        values = self.edge_values()
        if values.size == 0:
            return {"min": None, "p01": None, "mean": None}
        return {
            "min": float(values.min()),
            "p01": float(np.percentile(values, 1)),
            "mean": float(values.mean()),
        }


def random_walk_measure(g: MeshGraph, i: int) -> LocalMeasure:
    neighbors = g.neighbors[i]
    if not neighbors:
        raise GraphError(f"no measure for isolated node {i}")
    share = 1.0 / len(neighbors)
    return LocalMeasure(support=neighbors, mass=(share,) * len(neighbors))


def wasserstein1_plan(mu: LocalMeasure, nu: LocalMeasure, ground: GroundMetric) -> TransportPlan:
    """Exact W1 between two measures together with an optimal coupling."""
    cost = np.empty((len(mu.support), len(nu.support)))
    for a, p in enumerate(mu.support):
        for b, q in enumerate(nu.support):
            cost[a, b] = 0.0 if p == q else ground(p, q)
    if not np.all(np.isfinite(cost)):
        raise CurvatureError("infinite transport cost")

    plan = ot.emd(np.asarray(mu.mass), np.asarray(nu.mass), cost)
    return TransportPlan(
        cost=float(np.sum(plan * cost)),
        source_support=mu.support,
        target_support=nu.support,
        plan=plan,
    )


def wasserstein1(mu: LocalMeasure, nu: LocalMeasure, ground: GroundMetric) -> float:
    return wasserstein1_plan(mu, nu, ground).cost


def hop_ground_metric(g: MeshGraph) -> GroundMetric:
    """Hop distance ground metric (truncated BFS, infinite beyond radius 3)."""
    cache = DistanceCache(g, weighted=False)
    return cache.distance


def _edge_transport(g: MeshGraph, edge: Edge, cache: DistanceCache) -> Tuple[float, TransportPlan]:
    i, j = edge
    mu = random_walk_measure(g, i)
    nu = random_walk_measure(g, j)
    try:
        transport = wasserstein1_plan(mu, nu, cache.distance)
    except CurvatureError as e:
        raise CurvatureError(e.message, edge=edge) from e
    base = cache.distance(i, j) if cache.weighted else 1.0
    return 1.0 - transport.cost / base, transport


def _require_edge(g: MeshGraph, edge: Sequence[int]) -> Edge:
    i, j = int(edge[0]), int(edge[1])
    key = canonical_edge(i, j)
    if key not in g.edge_set:
        raise GraphError(f"edge ({i},{j}) is absent")
    return key


def edge_orc(g: MeshGraph, edge: Sequence[int], weighted: bool = False, cache: Optional[DistanceCache] = None) -> float:
    key = _require_edge(g, edge)
    if cache is None or cache.graph is not g or cache.weighted != weighted:
        cache = DistanceCache(g, weighted=weighted)
    kappa, _ = _edge_transport(g, key, cache)
    return kappa


def node_orc(g: MeshGraph, i: int, weighted: bool = False, cache: Optional[DistanceCache] = None) -> float:
    neighbors = g.neighbors[i]
    if not neighbors:
        raise GraphError(f"node {i} is isolated")
    if cache is None or cache.graph is not g or cache.weighted != weighted:
        cache = DistanceCache(g, weighted=weighted)
    total = 0.0
    for j in neighbors:
        total += edge_orc(g, (i, j), weighted=weighted, cache=cache)
    return total / len(neighbors)


def _node_means(g: MeshGraph, edge_curvature: Dict[Edge, float]) -> Dict[int, float]:
    nodes: Dict[int, float] = {}
    for i in range(g.node_count):
        neighbors = g.neighbors[i]
        if not neighbors:
            continue
        total = 0.0
        for j in neighbors:
            total += edge_curvature[canonical_edge(i, j)]
        nodes[i] = total / len(neighbors)
    return nodes


def full_report(g: MeshGraph, weighted: bool = False, keep_plans: bool = False) -> CurvatureReport:
    """κ for every edge and γ for every non-isolated node.

    Edges are evaluated independently on a thread pool; the report is
    assembled in edge order so the result does not depend on scheduling.
    """
    increment_count("full_report")
    start = time.perf_counter()
    cache = DistanceCache(g, weighted=weighted)

    def evaluate(chunk: List[Edge]):
        return [_edge_transport(g, e, cache) for e in chunk]

    edges = list(g.edges)
    # lazy adjacency views are built once before threads share the graph
    _ = (g.neighbors, g.nx_graph)
    threads = config.thread_count()
    if threads <= 1 or len(edges) < config.PARALLEL_EDGE_THRESHOLD:
        results = evaluate(edges)
    else:
        size = max(1, len(edges) // (threads * 4))
        chunks = [edges[k:k + size] for k in range(0, len(edges), size)]
        with ThreadPoolExecutor(max_workers=threads) as executor:
            results = [r for part in executor.map(evaluate, chunks) for r in part]

    edge_curvature = {e: kappa for e, (kappa, _) in zip(edges, results)}
    plans = {e: plan for e, (_, plan) in zip(edges, results)} if keep_plans else {}
    report = CurvatureReport(
        edge_curvature=edge_curvature,
        node_curvature=_node_means(g, edge_curvature),
        weighted=weighted,
        transport_plans=plans,
    )
    logger.info("%8f secs for curvature of %d edges", time.perf_counter() - start, len(edges))
    logger.debug("distance cache: %s", cache.get_stats())
    return report


def local_edge_orc(g: MeshGraph, edge: Sequence[int], extra_pairs: Iterable[Sequence[int]] = ()) -> float:
    """Hop-mode κ of ``edge`` after hypothetically inserting ``extra_pairs``.

    Only the radius-3 ball around the edge is materialised. Every extra pair
    must lie within hop 1 of the edge endpoints, which keeps the ball and
    hence the result exact.
    """
    i, j = _require_edge(g, edge)
    ball = set(bounded_bfs_distances(g, i, 3))
    ball.update(bounded_bfs_distances(g, j, 3))
    sub, mapping = induced_subgraph(g, ball)
    extra = [(mapping[p], mapping[q]) for p, q in extra_pairs]
    sub = add_edges(sub, extra)
    return edge_orc(sub, (mapping[i], mapping[j]))


def forman_curvature(g: MeshGraph, edge: Sequence[int]) -> float:
    i, j = _require_edge(g, edge)
    return float(4 - len(g.neighbors[i]) - len(g.neighbors[j]))


def node_forman(g: MeshGraph, i: int) -> float:
    neighbors = g.neighbors[i]
    if not neighbors:
        raise GraphError(f"node {i} is isolated")
    return sum(forman_curvature(g, (i, j)) for j in neighbors) / len(neighbors)
