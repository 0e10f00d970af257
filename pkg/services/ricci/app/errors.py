"""
Exception hierarchy. Every error carries the process exit code the CLI
reports for it; library code raises, only main.py converts.
"""
from typing import Optional, Tuple


class RicciError(Exception):
    exit_code = 1

    def __init__(self, message: str):
        super().__init__(message)
        self.message = message


class UsageError(RicciError):
    """Bad flags, unknown method names, invalid run configuration."""
    exit_code = 2


class GraphError(RicciError, ValueError):
    """Invalid indices, degenerate cells, absent edges, isolated nodes."""
    exit_code = 2


class CurvatureError(RicciError):
    exit_code = 3

    def __init__(
        self,
        message: str,
        edge: Optional[Tuple[int, int]] = None,
        frame: Optional[int] = None,
    ):
        super().__init__(message)
        self.edge = edge
        self.frame = frame

    def __str__(self) -> str:
        parts = [self.message]
        if self.frame is not None:
            parts.append(f"frame={self.frame}")
        if self.edge is not None:
            parts.append(f"edge=({self.edge[0]},{self.edge[1]})")
        return " ".join(parts)


class MissingFieldError(RicciError):
    exit_code = 4

    def __init__(self, field: str, frame: Optional[int] = None):
        where = f" in frame {frame}" if frame is not None else ""
        super().__init__(f"required field '{field}' is absent{where}")
        self.field = field
        self.frame = frame


class DisconnectedGraphError(RicciError):
    exit_code = 5
