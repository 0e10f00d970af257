"""
Physics-informed curvature rewiring.

Sources are the nodes with the lowest node curvature (or another former
selector); each source is joined to the node whose physical field differs
most from its own. Curvature is computed once for the whole pass.
"""
import logging
import time
from typing import Callable, List, Optional

import numpy as np

from services.ricci.app.curvature import CurvatureReport, full_report, node_forman
from services.ricci.app.diagnostics import betweenness_centrality, source_profile
from services.ricci.app.errors import MissingFieldError, UsageError
from services.ricci.app.models import MeshGraph, canonical_edge
from services.ricci.app.schemas import (
    FormerSelector,
    LatterSelector,
    RewireAction,
    RewireConfig,
    RewireMethod,
)

from .results import EditLog, RewireResult

logger = logging.getLogger(__name__)


def _lowest(scores: dict, k: int) -> List[int]:
    return sorted(scores, key=lambda i: (scores[i], i))[:k]


def _highest(scores: dict, k: int) -> List[int]:
    return sorted(scores, key=lambda i: (-scores[i], i))[:k]


def select_sources(
    g: MeshGraph,
    cfg: RewireConfig,
    curvature: Callable[[], CurvatureReport],
    rng: np.random.Generator,
) -> List[int]:
    """Rewiring sources in ascending node order."""
    k = cfg.source_count(g.node_count)
    selector = cfg.former_selector
    if selector == FormerSelector.ORC:
        chosen = _lowest(curvature().node_curvature, k)
    elif selector == FormerSelector.FORMAN:
        scores = {i: node_forman(g, i) for i in range(g.node_count) if g.neighbors[i]}
        chosen = _lowest(scores, k)
    elif selector == FormerSelector.DEGREE:
        chosen = _highest({i: int(d) for i, d in enumerate(g.degrees)}, k)
    elif selector == FormerSelector.BETWEENNESS:
        chosen = _highest(betweenness_centrality(g), k)
    else:
        chosen = rng.choice(g.node_count, size=k, replace=False).tolist()
    return sorted(int(i) for i in chosen)


def select_target(
    g: MeshGraph,
    source: int,
    selector: LatterSelector,
    values: Optional[np.ndarray],
    rng: np.random.Generator,
) -> int:
    """Node whose field value is farthest from the source's (lowest index on ties)."""
    if selector == LatterSelector.RANDOM:
        target = int(rng.integers(g.node_count - 1))
        return target + 1 if target >= source else target
    diff = values - values[source]
    distance = np.linalg.norm(diff, axis=1) if diff.ndim == 2 else np.abs(diff)
    distance[source] = -np.inf
    return int(np.argmax(distance))


def required_field(cfg: RewireConfig) -> Optional[str]:
    if cfg.method != RewireMethod.PIORF or cfg.latter_selector == LatterSelector.RANDOM:
        return None
    if cfg.action == RewireAction.REMOVE:
        return None
    return cfg.latter_selector.value


def piorf(g: MeshGraph, cfg: RewireConfig) -> RewireResult:
    if cfg.method != RewireMethod.PIORF:
        raise UsageError(f"piorf called with method {cfg.method.value}")
    n = g.node_count
    if n < 2:
        raise UsageError("rewiring needs at least 2 nodes")
    k = cfg.source_count(n)
    if k < 1:
        raise UsageError(f"pooling ratio {cfg.pooling_ratio} selects no nodes out of {n}")

    name = required_field(cfg)
    values = None
    if name is not None:
        values = g.field(name)
        if values is None:
            raise MissingFieldError(name)

    start = time.perf_counter()
    rng = np.random.default_rng(cfg.seed)
    state = {"report": None, "computations": 0}

    def curvature() -> CurvatureReport:
        if state["report"] is None:
            state["report"] = full_report(g, weighted=cfg.weighted)
            state["computations"] += 1
        return state["report"]

    log = EditLog(g)
    present = set(g.edges)
    if cfg.action in (RewireAction.REMOVE, RewireAction.BOTH):
        kappa = curvature().edge_curvature
        doomed = sorted(kappa, key=lambda e: (-kappa[e], e))[:k]
        for e in doomed:
            log.remove(*e)
            present.discard(e)

    sources: List[int] = []
    skipped = 0
    if cfg.action in (RewireAction.ADD, RewireAction.BOTH):
        sources = select_sources(g, cfg, curvature, rng)
        for s in sources:
            r = select_target(g, s, cfg.latter_selector, values, rng)
            key = canonical_edge(s, r)
            if key in present:
                skipped += 1
                continue
            present.add(key)
            log.add(s, r, cfg.direction.value)

    elapsed = time.perf_counter() - start
    logger.info("%8f secs for piorf: %d sources, %d skipped as duplicates", elapsed, len(sources), skipped)
    stats = {
        "seconds": elapsed,
        "timed_out": False,
        "curvature_computations": state["computations"],
        "duplicates_skipped": skipped,
        "sources": sources,
        "source_profile": source_profile(g, sources, state["report"]).model_dump(),
    }
    return log.result(stats)
