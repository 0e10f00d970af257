"""
Readers and writers for trajectory files (mgj), edit logs, JSON reports and
CSV tables.

Trajectory serialization is canonical: fixed key order, compact separators
and Python's shortest round-trip float repr, so parse followed by serialize
reproduces the input bytes.
"""
import json
import logging
from pathlib import Path
from typing import Any, Dict, List, Union

import numpy as np
import pandas as pd
from pydantic import ValidationError

from .errors import GraphError
from .models import MeshGraph, Trajectory, build_from_cells, canonical_edge
from .schemas import EditLogDocument, TrajectoryDocument

logger = logging.getLogger(__name__)

FORMAT_VERSION = 1

PathLike = Union[str, Path]


def _cell_side_edges(g: MeshGraph) -> set:
    sides = set()
    for a, b, c in g.cells or ():
        sides.update((canonical_edge(a, b), canonical_edge(b, c), canonical_edge(a, c)))
    return sides


def frame_to_document(g: MeshGraph) -> Dict[str, Any]:
    doc: Dict[str, Any] = {
        "positions": g.positions.tolist(),
        "cells": [list(c) for c in g.cells or ()],
        "node_type": g.node_type.tolist(),
        "velocity": g.velocity.tolist(),
    }
    if g.pressure is not None:
        doc["pressure"] = g.pressure.tolist()
    if g.density is not None:
        doc["density"] = g.density.tolist()
    if set(g.edges) != _cell_side_edges(g):
        doc["edges"] = [list(e) for e in g.edges]
    return doc


def trajectory_to_document(t: Trajectory) -> Dict[str, Any]:
    return {
        "version": FORMAT_VERSION,
        "static_mesh": t.static_mesh,
        "frames": [frame_to_document(g) for g in t.frames],
    }


def serialize_trajectory(t: Trajectory) -> str:
    try:
        return json.dumps(trajectory_to_document(t), separators=(",", ":"), allow_nan=False) + "\n"
    except ValueError as e:
        raise GraphError(f"trajectory cannot be serialized: {e}") from e


def parse_trajectory(text: str) -> Trajectory:
    # the stdlib parser rounds decimal floats exactly, keeping re-serialization byte-stable
    try:
        doc = TrajectoryDocument.model_validate(json.loads(text))
    except (ValueError, ValidationError) as e:
        raise GraphError(f"invalid trajectory file: {e}") from e

    frames = []
    for index, frame in enumerate(doc.frames):
        n = len(frame.positions)
        for name in ("node_type", "velocity", "pressure", "density"):
            values = getattr(frame, name)
            if values is not None and len(values) != n:
                raise GraphError(f"frame {index}: {name} has {len(values)} entries for {n} nodes")
        fields = {
            "velocity": np.asarray(frame.velocity, dtype=np.float64).reshape(n, 2),
            "node_type": np.asarray(frame.node_type, dtype=np.int64),
        }
        if frame.pressure is not None:
            fields["pressure"] = np.asarray(frame.pressure, dtype=np.float64)
        if frame.density is not None:
            fields["density"] = np.asarray(frame.density, dtype=np.float64)
        try:
            g = build_from_cells(np.asarray(frame.positions, dtype=np.float64).reshape(n, 2), frame.cells, fields)
            if frame.edges is not None:
                g = g.with_edges(frame.edges, g.cells)
        except GraphError as e:
            raise GraphError(f"frame {index}: {e.message}") from e
        frames.append(g)
    return Trajectory(frames=tuple(frames), static_mesh=doc.static_mesh)


def read_trajectory(path: PathLike) -> Trajectory:
    return parse_trajectory(Path(path).read_text())


def write_trajectory(t: Trajectory, path: PathLike) -> None:
    Path(path).write_text(serialize_trajectory(t))
    logger.info("wrote %d frames to %s", len(t), path)


def write_json(payload: Any, path: PathLike) -> None:
    """Pretty-printed JSON; pydantic models are dumped in JSON mode first."""
    if hasattr(payload, "model_dump"):
        payload = payload.model_dump(mode="json")
    Path(path).write_text(json.dumps(payload, indent=2) + "\n")


def read_edit_log(path: PathLike) -> EditLogDocument:
    try:
        return EditLogDocument.model_validate_json(Path(path).read_text())
    except ValidationError as e:
        raise GraphError(f"invalid edit log: {e}") from e


def write_edit_log(log: EditLogDocument, path: PathLike) -> None:
    write_json(log, path)


def write_table(rows: List[Dict[str, Any]], columns: List[str], path: PathLike) -> pd.DataFrame:
    """CSV with exactly ``columns``, header only when ``rows`` is empty."""
    frame = pd.DataFrame(rows, columns=columns)
    frame.to_csv(path, index=False)
    return frame
