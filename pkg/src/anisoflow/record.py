"""Time-series record of a run."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

COLUMNS = (
    "t",
    "tau",
    "A",
    "L",
    "L_sigma",
    "Pi_sigma",
    "min_r",
    "max_r",
    "mesh_ratio",
    "min_phi",
    "candidate",
    "err_A",
    "err_ratio",
    "sum_ksigma_r",
)


@dataclass
class RunRecord:
    rows: list = field(default_factory=list)
    snapshots: list = field(default_factory=list)  # (t, PolyCurve)
    status: str = "running"
    error: str | None = None
    error_step: int | None = None
    steps: int = 0
    max_residual: float = 0.0
    min_dominance: float = np.inf
    final_points: np.ndarray | None = None
    meta: dict = field(default_factory=dict)

    def append(self, **values):
        self.rows.append(tuple(float(values[c]) for c in COLUMNS))

    @property
    def series(self):
        """Rows as a (n_rows, 14) float array."""
        if not self.rows:
            return np.empty((0, len(COLUMNS)))
        return np.asarray(self.rows, dtype=float)

    def column(self, name):
        return self.series[:, COLUMNS.index(name)]

    @property
    def ok(self):
        return self.status == "completed"

    def snapshot_times(self):
        return [t for t, _ in self.snapshots]
