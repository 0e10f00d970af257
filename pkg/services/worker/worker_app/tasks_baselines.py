"""
Baseline rewiring methods: diffusion (DIGL), curvature-driven surgery
(SDRF), spectral-gap augmentation (FoSR) and batched transport-plan rewiring
(BORF). All of them keep the original mesh edges unless a method removes
edges explicitly.
"""
import logging
import time
from typing import List, Optional

import numpy as np
import scipy.sparse as sp

from services.ricci.app.cache import DistanceCache
from services.ricci.app.curvature import edge_orc, full_report, local_edge_orc
from services.ricci.app.errors import DisconnectedGraphError, UsageError
from services.ricci.app.models import (
    MeshGraph,
    add_edges,
    bounded_bfs_distances,
    canonical_edge,
    is_connected,
    remove_edges,
)

from .pool import Budget
from .results import EditLog, RewireResult

logger = logging.getLogger(__name__)

IMPROVEMENT_TOLERANCE = 1e-12


def _require_connected(g: MeshGraph, method: str) -> None:
    if not is_connected(g):
        raise DisconnectedGraphError(f"{method} needs a connected graph")


def _dense_adjacency(g: MeshGraph) -> np.ndarray:
    n = g.node_count
    adjacency = np.zeros((n, n))
    if g.edges:
        pairs = np.asarray(g.edges, dtype=np.int64)
        adjacency[pairs[:, 0], pairs[:, 1]] = 1.0
        adjacency[pairs[:, 1], pairs[:, 0]] = 1.0
    return adjacency


def ppr_diffusion(g: MeshGraph, alpha: float) -> np.ndarray:
    """S = α (I - (1 - α) T)⁻¹ with T = D^-1/2 (A + I) D^-1/2."""
    n = g.node_count
    a_hat = _dense_adjacency(g) + np.eye(n)
    scale = 1.0 / np.sqrt(a_hat.sum(axis=1))
    transition = scale[:, None] * a_hat * scale[None, :]
    return alpha * np.linalg.solve(np.eye(n) - (1.0 - alpha) * transition, np.eye(n))


def digl(g: MeshGraph, alpha: float = 0.01, eps: float = 0.4) -> RewireResult:
    """Adds every non-edge whose diffusion weight exceeds ``eps``; mesh edges stay."""
    if not 0.0 < alpha <= 1.0:
        raise UsageError(f"alpha must lie in (0, 1], got {alpha}")
    if eps < 0.0:
        raise UsageError(f"eps must be non-negative, got {eps}")
    _require_connected(g, "digl")

    start = time.perf_counter()
    diffusion = ppr_diffusion(g, alpha)
    rows, cols = np.triu_indices(g.node_count, k=1)
    adjacency = _dense_adjacency(g)
    mask = (diffusion[rows, cols] > eps) & (adjacency[rows, cols] == 0.0)

    log = EditLog(g)
    pairs = list(zip(rows[mask].tolist(), cols[mask].tolist()))
    for i, j in pairs:
        log.add(i, j)
    elapsed = time.perf_counter() - start
    logger.info("%8f secs for digl: %d pairs above %g", elapsed, len(pairs), eps)
    return log.result({"seconds": elapsed, "timed_out": False})


def sdrf(g: MeshGraph, max_iterations: int = 10, budget: Optional[Budget] = None) -> RewireResult:
    """Repeatedly supports the most negatively curved edge with the best local shortcut.

    Candidates are scored by the exact curvature of the target edge after the
    hypothetical insertion; selection is a deterministic argmax.
    """
    if max_iterations < 1:
        raise UsageError(f"max_iterations must be at least 1, got {max_iterations}")
    budget = budget or Budget()
    start = time.perf_counter()

    current = g
    kappa = dict(full_report(g).edge_curvature)
    log = EditLog(g)
    improvements = []
    timed_out = False
    for _ in range(max_iterations):
        if budget.exceeded():
            timed_out = True
            logger.warning("sdrf stopped after %d additions: budget exhausted", len(improvements))
            break
        if not kappa:
            break
        i, j = min(kappa, key=lambda e: (kappa[e], e))
        before = kappa[(i, j)]
        candidates = sorted(
            {
                canonical_edge(p, q)
                for p in (i,) + current.neighbors[i]
                for q in (j,) + current.neighbors[j]
                if p != q
            }
            - current.edge_set
        )
        best, best_kappa = None, before
        for pair in candidates:
            value = local_edge_orc(current, (i, j), [pair])
            if value > best_kappa + IMPROVEMENT_TOLERANCE:
                best, best_kappa = pair, value
        if best is None:
            logger.info("sdrf: no candidate improves edge (%d,%d)", i, j)
            break

        current = add_edges(current, [best])
        log.add(*best)
        improvements.append({"edge": [i, j], "added": list(best), "before": before, "after": best_kappa})

        # only edges with an endpoint within two hops of the new pair can change
        near = set(bounded_bfs_distances(current, best[0], 2)) | set(bounded_bfs_distances(current, best[1], 2))
        cache = DistanceCache(current)
        for e in current.edges:
            if e[0] in near or e[1] in near:
                kappa[e] = edge_orc(current, e, cache=cache)

    elapsed = time.perf_counter() - start
    logger.info("%8f secs for sdrf: %d edges added", elapsed, len(improvements))
    stats = {
        "seconds": elapsed,
        "timed_out": timed_out,
        "curvature_computations": 1,
        "improvements": improvements,
        "deviation": "ORC instead of balanced Forman curvature; deterministic argmax instead of softmax sampling",
    }
    return log.result(stats)


def _normalized_adjacency(g: MeshGraph, degrees: np.ndarray) -> sp.csr_matrix:
    n = g.node_count
    if g.edges:
        pairs = np.asarray(g.edges, dtype=np.int64)
        rows = np.concatenate([pairs[:, 0], pairs[:, 1], np.arange(n)])
        cols = np.concatenate([pairs[:, 1], pairs[:, 0], np.arange(n)])
    else:
        rows = cols = np.arange(n)
    scale = 1.0 / np.sqrt(degrees + 1.0)
    data = scale[rows] * scale[cols]
    return sp.csr_matrix((data, (rows, cols)), shape=(n, n))


def _power_step(matrix: sp.csr_matrix, x: np.ndarray, degrees: np.ndarray) -> np.ndarray:
    x = matrix @ x
    top = np.sqrt(degrees + 1.0)
    top /= np.linalg.norm(top)
    x -= (x @ top) * top
    norm = np.linalg.norm(x)
    return x / norm if norm > 0 else x


def fosr(
    g: MeshGraph,
    initial_power: int = 5,
    max_iterations: int = 20,
    seed: int = 0,
    budget: Optional[Budget] = None,
) -> RewireResult:
    """Greedy first-order spectral-gap augmentation.

    x tracks the second eigenvector of the self-looped normalized adjacency;
    each step adds the non-edge minimising x_u x_v / sqrt((1 + d_u)(1 + d_v)).
    """
    if max_iterations < 1:
        raise UsageError(f"max_iterations must be at least 1, got {max_iterations}")
    _require_connected(g, "fosr")
    budget = budget or Budget()
    start = time.perf_counter()

    n = g.node_count
    degrees = g.degrees.astype(np.float64)
    rng = np.random.default_rng(seed)
    x = _power_step(sp.identity(n, format="csr"), rng.standard_normal(n), degrees)
    matrix = _normalized_adjacency(g, degrees)
    for _ in range(initial_power):
        x = _power_step(matrix, x, degrees)

    allowed = np.triu(np.ones((n, n), dtype=bool), k=1)
    allowed &= _dense_adjacency(g) == 0.0

    current = g
    log = EditLog(g)
    timed_out = False
    for _ in range(max_iterations):
        if budget.exceeded():
            timed_out = True
            logger.warning("fosr stopped after %d additions: budget exhausted", len(log.added))
            break
        if not allowed.any():
            break
        weights = x / np.sqrt(1.0 + degrees)
        scores = np.where(allowed, np.outer(weights, weights), np.inf)
        u, v = divmod(int(np.argmin(scores)), n)
        allowed[u, v] = False
        current = add_edges(current, [(u, v)])
        log.add(u, v)
        degrees[u] += 1.0
        degrees[v] += 1.0
        matrix = _normalized_adjacency(current, degrees)
        x = _power_step(matrix, x, degrees)

    elapsed = time.perf_counter() - start
    logger.info("%8f secs for fosr: %d edges added", elapsed, len(log.added))
    stats = {
        "seconds": elapsed,
        "timed_out": timed_out,
        "criterion": "first-order proxy x_u x_v / sqrt((1+d_u)(1+d_v))",
    }
    return log.result(stats)


def borf(
    g: MeshGraph,
    batches: int = 10,
    add_per_batch: int = 4,
    remove_per_batch: int = 2,
    budget: Optional[Budget] = None,
) -> RewireResult:
    """Batched rewiring that reuses the optimal transport plans of one curvature pass per batch."""
    if batches < 1:
        raise UsageError(f"batches must be at least 1, got {batches}")
    if add_per_batch < 0 or remove_per_batch < 0:
        raise UsageError("per-batch counts must be non-negative")
    budget = budget or Budget()
    start = time.perf_counter()

    current = g
    log = EditLog(g)
    computations = 0
    timed_out = False
    completed = 0
    for batch in range(batches):
        report = full_report(current, keep_plans=True)
        computations += 1
        kappa = report.edge_curvature

        present = set(current.edges)
        additions: List[tuple] = []
        for e in sorted(kappa, key=lambda e: (kappa[e], e))[:add_per_batch]:
            transport = report.transport_plans[e]
            # max transported mass over non-adjacent pairs, zero-mass pairs included
            best = None
            for a, p in enumerate(transport.source_support):
                for b, q in enumerate(transport.target_support):
                    mass = float(transport.plan[a, b])
                    key = canonical_edge(p, q)
                    if p == q or key in present:
                        continue
                    if best is None or (-mass, key) < best:
                        best = (-mass, key)
            if best is None:
                continue
            present.add(best[1])
            additions.append(best[1])
            log.add(*best[1])

        removals = sorted(kappa, key=lambda e: (-kappa[e], e))[:remove_per_batch]
        for e in removals:
            log.remove(*e)
        current = remove_edges(add_edges(current, additions), removals)
        completed = batch + 1

        if batch < batches - 1 and budget.exceeded():
            timed_out = True
            logger.warning("borf stopped after %d of %d batches: budget exhausted", completed, batches)
            break

    elapsed = time.perf_counter() - start
    logger.info("%8f secs for borf: %d batches", elapsed, completed)
    stats = {
        "seconds": elapsed,
        "timed_out": timed_out,
        "batches_completed": completed,
        "curvature_computations": computations,
    }
    return log.result(stats)
