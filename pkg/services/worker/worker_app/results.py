"""
Rewiring results and the edit log that makes them replayable.
"""
from dataclasses import dataclass, field
from typing import Any, Dict, List, Sequence, Tuple

from services.ricci.app.models import Edge, MeshGraph, add_edges, canonical_edge, remove_edges
from services.ricci.app.schemas import EdgeDirection, FrameEdits

AddedEdge = Tuple[int, int, str]


@dataclass
class RewireResult:
    graph: MeshGraph
    added: List[AddedEdge]
    removed: List[Edge]
    stats: Dict[str, Any] = field(default_factory=dict)

    def to_frame_edits(self, frame: int) -> FrameEdits:
        return FrameEdits(
            frame=frame,
            added=[(s, r, EdgeDirection(tag)) for s, r, tag in self.added],
            removed=list(self.removed),
            stats=self.stats,
        )


class EditLog:
    """Net edits against an original graph.

    Removing an edge added earlier in the same run drops it from ``added``;
    re-adding a removed original edge drops it from ``removed``. The final
    edge set is therefore always (original - removed) | added.
    """

    def __init__(self, original: MeshGraph):
        self._graph = original
        self._original = original.edge_set
        self.added: List[AddedEdge] = []
        self.removed: List[Edge] = []

    def add(self, source: int, target: int, tag: str = EdgeDirection.BIDIRECTIONAL.value) -> None:
        key = canonical_edge(source, target)
        if key in self.removed:
            self.removed.remove(key)
        elif key not in self._original:
            self.added.append((int(source), int(target), tag))

    def remove(self, i: int, j: int) -> None:
        key = canonical_edge(i, j)
        for index, (s, r, _) in enumerate(self.added):
            if canonical_edge(s, r) == key:
                del self.added[index]
                return
        if key in self._original and key not in self.removed:
            self.removed.append(key)

    def result(self, stats: Dict[str, Any]) -> RewireResult:
        """Result whose graph is the original with the net edits applied."""
        graph = apply_edits(self._graph, self.removed, self.added)
        stats = dict(stats)
        stats["edges_added"] = len(self.added)
        stats["edges_removed"] = len(self.removed)
        return RewireResult(graph=graph, added=list(self.added), removed=list(self.removed), stats=stats)


def apply_edits(g: MeshGraph, removed: Sequence[Sequence[int]], added: Sequence[Sequence[int]]) -> MeshGraph:
    """Removals first, then additions (only the pair of each added entry is used)."""
    g = remove_edges(g, [(e[0], e[1]) for e in removed])
    return add_edges(g, [(e[0], e[1]) for e in added])
