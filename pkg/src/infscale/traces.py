"""Containers for monitored processes."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

KINDS = (
    "birkhoff_sum",
    "maxima",
    "min_distance",
    "run_length_0",
    "run_length_1",
    "bc_counter",
    "erdos_renyi",
    "identity",
    "ratio",
)

# direction each kind must move in: +1 non-decreasing, -1 non-increasing
MONOTONE = {
    "maxima": 1,
    "min_distance": -1,
    "run_length_0": 1,
    "run_length_1": 1,
    "bc_counter": 1,
}


@dataclass
class ProcessTrace:
    """Values of one process at increasing checkpoint times."""

    kind: str
    checkpoints: np.ndarray
    values: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown trace kind {self.kind!r}")
        self.checkpoints = np.asarray(self.checkpoints, dtype=np.int64)
        self.values = np.asarray(self.values)
        if self.checkpoints.shape != self.values.shape:
            raise ValueError("checkpoints and values differ in length")

    def __len__(self):
        return self.checkpoints.shape[0]

    def at(self, n: int):
        i = np.searchsorted(self.checkpoints, n)
        if i >= len(self) or self.checkpoints[i] != n:
            raise KeyError(f"no checkpoint at {n}")
        return self.values[i]

    def is_monotone(self, nonneg_observable: bool = False) -> bool:
        """Check the monotonicity its kind promises (exact comparison)."""
        direction = MONOTONE.get(self.kind)
        if self.kind == "birkhoff_sum" and nonneg_observable:
            direction = 1
        if direction is None or len(self) < 2:
            return True
        d = np.diff(self.values.astype(float))
        return bool(np.all(d >= 0) if direction > 0 else np.all(d <= 0))


@dataclass
class HittingRecord:
    """First-passage times for a family of targets.

    ``levels`` are thresholds u (hit when phi > u) or radii r (hit when
    d < r); ``tau[i]`` is the first time, or -1 when censored at
    ``horizon``.
    """

    levels: np.ndarray
    tau: np.ndarray
    horizon: int
    kind: str = "radius"

    def __post_init__(self):
        self.levels = np.asarray(self.levels, dtype=float)
        self.tau = np.asarray(self.tau, dtype=np.int64)

    @property
    def resolved(self) -> np.ndarray:
        return self.tau >= 0

    def is_monotone(self) -> bool:
        """tau non-decreasing as targets shrink (censored counts as infinite)."""
        t = np.where(self.tau < 0, np.iinfo(np.int64).max, self.tau)
        order = np.argsort(self.levels)
        if self.kind == "radius":
            order = order[::-1]  # shrinking radii
        return bool(np.all(np.diff(t[order]) >= 0))
