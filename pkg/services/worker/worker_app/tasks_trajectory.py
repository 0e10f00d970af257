"""
Method dispatch and trajectory-level rewiring.
"""
import logging
from typing import List, Optional

from services.ricci.app.errors import MissingFieldError, UsageError
from services.ricci.app.models import Trajectory, MeshGraph
from services.ricci.app.schemas import RewireConfig, RewireMethod, TrajectoryMode

from .pool import Budget, map_ordered
from .results import RewireResult, apply_edits
from .tasks_baselines import borf, digl, fosr, sdrf
from .tasks_piorf import piorf, required_field

logger = logging.getLogger(__name__)


def rewire(g: MeshGraph, cfg: RewireConfig) -> RewireResult:
    """Run the method named by ``cfg`` on one graph."""
    params = cfg.resolved_params()
    budget = Budget(cfg.budget_seconds)
    if cfg.method == RewireMethod.PIORF:
        return piorf(g, cfg)
    if cfg.method == RewireMethod.DIGL:
        return digl(g, alpha=params.alpha, eps=params.eps)
    if cfg.method == RewireMethod.SDRF:
        return sdrf(g, max_iterations=params.max_iterations, budget=budget)
    if cfg.method == RewireMethod.FOSR:
        return fosr(
            g,
            initial_power=params.initial_power,
            max_iterations=params.max_iterations,
            seed=cfg.seed,
            budget=budget,
        )
    if cfg.method == RewireMethod.BORF:
        return borf(
            g,
            batches=params.batches,
            add_per_batch=params.add_per_batch,
            remove_per_batch=params.remove_per_batch,
            budget=budget,
        )
    raise UsageError(f"unknown method {cfg.method}")


def _check_fields(t: Trajectory, cfg: RewireConfig) -> None:
    name: Optional[str] = required_field(cfg)
    if name is None:
        return
    for index, frame in enumerate(t.frames):
        if frame.field(name) is None:
            raise MissingFieldError(name, frame=index)


def rewire_trajectory(
    t: Trajectory,
    cfg: RewireConfig,
    mode: TrajectoryMode = TrajectoryMode.PER_FRAME,
) -> List[RewireResult]:
    """One result per frame, in frame order.

    per_frame rewires every frame from its own fields and topology;
    first_frame computes the edits on frame 0 and replays them on the rest.
    """
    _check_fields(t, cfg)
    if mode == TrajectoryMode.FIRST_FRAME:
        if not t.static_mesh:
            raise UsageError("first_frame mode needs a static-mesh trajectory")
        first = rewire(t.frames[0], cfg)
        results = [first]
        for frame in t.frames[1:]:
            stats = dict(first.stats, seconds=0.0, reused_from_frame=0)
            results.append(
                RewireResult(
                    graph=apply_edits(frame, first.removed, first.added),
                    added=list(first.added),
                    removed=list(first.removed),
                    stats=stats,
                )
            )
        return results

    results = map_ordered(lambda frame: rewire(frame, cfg), t.frames)
    for index, result in enumerate(results):
        logger.info(
            "frame %d: %d added, %d removed",
            index, len(result.added), len(result.removed),
        )
    return results
