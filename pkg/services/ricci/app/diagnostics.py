"""
Structure diagnostics: effective resistance, curvature and degree
distributions, the curvature/degree correlation and betweenness.
"""
import logging
import weakref
from typing import Dict, Iterable, List, Optional, Sequence

import networkx as nx
import numpy as np
from scipy.sparse.linalg import splu

from . import config
from .curvature import CurvatureReport, full_report
from .errors import DisconnectedGraphError, GraphError
from .models import MeshGraph, connected_components
from .schemas import (
    ComparisonReport,
    DiagnosticsReport,
    Histogram,
    SourceProfile,
)

logger = logging.getLogger(__name__)

CURVATURE_BINS = 64
CURVATURE_RANGE = (-2.0, 1.0)
HIGH_DEGREE = 7
RESISTANCE_BLOCK = 256

_pinv_cache: "weakref.WeakKeyDictionary[MeshGraph, np.ndarray]" = weakref.WeakKeyDictionary()


def laplacian(g: MeshGraph):
    """Combinatorial Laplacian D - A as a sparse matrix in node order."""
    return nx.laplacian_matrix(g.nx_graph, nodelist=range(g.node_count)).astype(np.float64)


def laplacian_pseudoinverse(g: MeshGraph) -> np.ndarray:
    """Dense L⁺ from an eigendecomposition; one zero eigenvalue per component is dropped."""
    cached = _pinv_cache.get(g)
    if cached is not None:
        return cached
    n = g.node_count
    if n == 0:
        return np.zeros((0, 0))
    values, vectors = np.linalg.eigh(laplacian(g).toarray())
    kernel = len(connected_components(g))
    inverse = np.zeros_like(values)
    inverse[kernel:] = 1.0 / values[kernel:]
    pinv = (vectors * inverse) @ vectors.T
    pinv.setflags(write=False)
    _pinv_cache[g] = pinv
    return pinv


def _component_of(g: MeshGraph, u: int) -> List[int]:
    return sorted(nx.node_connected_component(g.nx_graph, u))


def _grounded_solve(g: MeshGraph, u: int, v: int) -> float:
    # R(u, v) = x_v where L with row/column u removed solves L x = e_v
    component = _component_of(g, u)
    index = {node: k for k, node in enumerate(w for w in component if w != u)}
    sub = laplacian(g)[component, :][:, component].tocsc()
    keep = [k for k, node in enumerate(component) if node != u]
    grounded = sub[keep, :][:, keep].tocsc()
    rhs = np.zeros(len(keep))
    rhs[index[v]] = 1.0
    solution = splu(grounded).solve(rhs)
    return float(solution[index[v]])


def effective_resistance(g: MeshGraph, u: int, v: int) -> float:
    n = g.node_count
    for node in (u, v):
        if node < 0 or node >= n:
            raise GraphError(f"node index {node} out of range for {n} nodes")
    if u == v:
        return 0.0
    if not nx.has_path(g.nx_graph, u, v):
        raise DisconnectedGraphError(f"infinite resistance between {u} and {v}")
    if n <= config.DENSE_RESISTANCE_LIMIT:
        pinv = laplacian_pseudoinverse(g)
        return float(pinv[u, u] + pinv[v, v] - 2.0 * pinv[u, v])
    return _grounded_solve(g, u, v)


def _grounded_total(g: MeshGraph) -> float:
    # with G the inverse of L grounded at node 0, |V| tr(L⁺) = |V| tr(G) - 1ᵀ G 1
    n = g.node_count
    lu = splu(laplacian(g)[1:, 1:].tocsc())
    m = n - 1
    trace = 0.0
    mass = 0.0
    for start in range(0, m, RESISTANCE_BLOCK):
        stop = min(start + RESISTANCE_BLOCK, m)
        rhs = np.zeros((m, stop - start))
        rhs[np.arange(start, stop), np.arange(stop - start)] = 1.0
        block = lu.solve(rhs)
        trace += float(np.trace(block[start:stop]))
        mass += float(block.sum())
    return n * trace - mass


def total_effective_resistance(g: MeshGraph) -> float:
    """Sum of R(u, v) over unordered pairs, as |V| · trace(L⁺).

    Above ``DENSE_RESISTANCE_LIMIT`` nodes the trace comes from one sparse
    factorisation solved in column blocks instead of a dense spectrum.
    """
    n = g.node_count
    if n <= 1:
        return 0.0
    if len(connected_components(g)) != 1:
        raise DisconnectedGraphError("total effective resistance is infinite on a disconnected graph")
    if n > config.DENSE_RESISTANCE_LIMIT:
        return float(_grounded_total(g))
    values = np.linalg.eigvalsh(laplacian(g).toarray())
    return float(n * np.sum(1.0 / values[1:]))


def betweenness_centrality(g: MeshGraph) -> Dict[int, float]:
    """Unnormalized shortest-path betweenness, each unordered pair counted once."""
    return nx.betweenness_centrality(g.nx_graph, normalized=False)


def curvature_histogram(values: Iterable[float], bins: int = CURVATURE_BINS) -> Histogram:
    """Counts over fixed bins on [-2, 1]; values outside are clipped to the ends."""
    data = np.clip(np.asarray(list(values), dtype=np.float64), *CURVATURE_RANGE)
    counts, edges = np.histogram(data, bins=bins, range=CURVATURE_RANGE)
    return Histogram(bin_edges=edges.tolist(), counts=counts.tolist())


def degree_histogram(g: MeshGraph) -> Dict[int, int]:
    counts = np.bincount(g.degrees) if g.node_count else np.zeros(0, dtype=np.int64)
    return {int(d): int(c) for d, c in enumerate(counts) if c}


def orc_degree_pearson(g: MeshGraph, report: CurvatureReport) -> Optional[float]:
    """Pearson correlation of γ_i against deg(i); None when either side is constant."""
    nodes = sorted(report.node_curvature)
    if len(nodes) < 2:
        return None
    gamma = np.array([report.node_curvature[i] for i in nodes])
    degrees = g.degrees[nodes].astype(np.float64)
    if np.ptp(gamma) == 0.0 or np.ptp(degrees) == 0.0:
        return None
    return float(np.corrcoef(gamma, degrees)[0, 1])


def velocity_gradient(g: MeshGraph) -> np.ndarray:
    """Per node, mean of ‖w_i - w_j‖ / ‖x_i - x_j‖ over incident edges of non-zero length."""
    n = g.node_count
    totals = np.zeros(n)
    counts = np.zeros(n)
    if g.edges:
        pairs = np.asarray(g.edges, dtype=np.int64)
        dw = np.linalg.norm(g.velocity[pairs[:, 0]] - g.velocity[pairs[:, 1]], axis=1)
        dx = np.linalg.norm(g.positions[pairs[:, 0]] - g.positions[pairs[:, 1]], axis=1)
        valid = dx > 0
        ratio = np.zeros_like(dw)
        ratio[valid] = dw[valid] / dx[valid]
        for column in (0, 1):
            np.add.at(totals, pairs[valid, column], ratio[valid])
            np.add.at(counts, pairs[valid, column], 1)
    gradient = np.zeros(n)
    mask = counts > 0
    gradient[mask] = totals[mask] / counts[mask]
    return gradient


def high_degree_count(g: MeshGraph, threshold: int = HIGH_DEGREE) -> int:
    return int(np.count_nonzero(g.degrees >= threshold))


def diagnose(
    g: MeshGraph,
    report: Optional[CurvatureReport] = None,
    include_resistance: bool = True,
) -> DiagnosticsReport:
    """Scalar and distributional structure metrics for one graph.

    With ``include_resistance`` a disconnected graph raises; without it the
    resistance total is reported as None.
    """
    if report is None:
        report = full_report(g)
    components = connected_components(g)
    connected = len(components) <= 1

    total = None
    if include_resistance:
        total = total_effective_resistance(g)
    elif connected:
        logger.info("effective resistance skipped on request")
    else:
        logger.warning("graph has %d components; effective resistance skipped", len(components))

    summary = report.summary()
    gradient = velocity_gradient(g)
    return DiagnosticsReport(
        node_count=g.node_count,
        edge_count=g.edge_count,
        connected=connected,
        component_count=len(components),
        total_effective_resistance=total,
        curvature_histogram=curvature_histogram(report.edge_values()),
        degree_histogram=degree_histogram(g),
        orc_degree_pearson=orc_degree_pearson(g, report),
        min_edge_curvature=summary["min"],
        p01_edge_curvature=summary["p01"],
        mean_edge_curvature=summary["mean"],
        high_degree_count=high_degree_count(g),
        mean_velocity_gradient=float(gradient.mean()) if gradient.size else 0.0,
    )


SCALAR_FIELDS = (
    "node_count",
    "edge_count",
    "component_count",
    "total_effective_resistance",
    "orc_degree_pearson",
    "min_edge_curvature",
    "p01_edge_curvature",
    "mean_edge_curvature",
    "high_degree_count",
    "mean_velocity_gradient",
)


def compare(before: MeshGraph, after: MeshGraph, include_resistance: bool = True) -> ComparisonReport:
    """Paired reports with signed deltas (after - before) for every scalar."""
    if before.node_count != after.node_count:
        raise GraphError(
            f"node counts differ: {before.node_count} before, {after.node_count} after"
        )
    first = diagnose(before, include_resistance=include_resistance)
    second = diagnose(after, include_resistance=include_resistance)
    deltas: Dict[str, Optional[float]] = {}
    for name in SCALAR_FIELDS:
        a, b = getattr(first, name), getattr(second, name)
        deltas[name] = None if a is None or b is None else float(b - a)
    return ComparisonReport(before=first, after=second, deltas=deltas)


def source_profile(g: MeshGraph, sources: Sequence[int], report: Optional[CurvatureReport] = None) -> SourceProfile:
    """Mean γ, degree and velocity gradient over ``sources`` next to whole-graph means.

    Without a curvature report the γ entries stay empty; nothing is recomputed.
    """
    gradient = velocity_gradient(g)

    def mean_gamma(nodes: Sequence[int]) -> Optional[float]:
        if report is None:
            return None
        values = [report.node_curvature[i] for i in nodes if i in report.node_curvature]
        return float(np.mean(values)) if values else None

    def mean_of(values: np.ndarray, nodes: Sequence[int]) -> Optional[float]:
        return float(values[list(nodes)].mean()) if len(nodes) else None

    all_nodes = list(range(g.node_count))
    return SourceProfile(
        source_count=len(sources),
        source_mean_gamma=mean_gamma(sources),
        graph_mean_gamma=mean_gamma(range(g.node_count)),
        source_mean_degree=mean_of(g.degrees.astype(np.float64), sources),
        graph_mean_degree=mean_of(g.degrees.astype(np.float64), all_nodes),
        source_mean_velocity_gradient=mean_of(gradient, sources),
        graph_mean_velocity_gradient=mean_of(gradient, all_nodes),
    )
