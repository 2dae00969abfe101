"""Thinned trajectory records shared by the simulation runners."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import EmptyLog, ValidationError


@dataclass(eq=False)
class TrajectoryLog:
    """Thinned time series produced by a run.

    ``steps`` holds the global step indices at which the run was sampled
    (strictly increasing, starting at 0).  ``columns`` maps a name to an
    array whose leading dimension matches ``steps``: 1-D arrays are
    scalar series (error norms, sums), 2-D arrays are per-node series.
    ``meta`` carries run provenance (seed, config hash, wall time, ...).
    """

    steps: np.ndarray
    columns: dict[str, np.ndarray]
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.steps = np.asarray(self.steps, dtype=np.int64)
        if self.steps.ndim != 1:
            raise ValidationError("steps must be 1-D")
        if self.steps.size and np.any(np.diff(self.steps) <= 0):
            raise ValidationError("steps must be strictly increasing")
        for name, col in self.columns.items():
            if col.shape[0] != self.steps.shape[0]:
                raise ValidationError(
                    f"column {name!r} has {col.shape[0]} rows, expected {self.steps.shape[0]}"
                )

    @property
    def n_rows(self) -> int:
        return int(self.steps.shape[0])

    def column(self, name: str) -> np.ndarray:
        try:
            return self.columns[name]
        except KeyError:
            raise KeyError(f"log has no column {name!r}; available: {sorted(self.columns)}")

    def require_rows(self):
        if self.n_rows == 0:
            raise EmptyLog("trajectory log holds no rows")


def log_points(steps: int, thin: int) -> np.ndarray:
    """Step indices 0, thin, 2*thin, ... plus the final step."""
    if thin < 1:
        raise ValueError("thin must be >= 1")
    pts = list(range(0, steps + 1, thin))
    if pts[-1] != steps:
        pts.append(steps)
    return np.asarray(pts, dtype=np.int64)
