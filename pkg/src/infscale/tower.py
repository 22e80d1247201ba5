"""Young tower over a synthetic Gibbs-Markov base with R-tail ~ n^(-beta-1).

The base is [0, 1) cut into consecutive branch intervals of lengths
``l_i = i^(-beta-1) / zeta(beta+1)``, i = 1, 2, ...; branch i is sent
affinely onto [0, 1) and its return time is R = i.  Branches beyond
``i_max`` are folded into branch ``i_max``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import zeta

from . import _kernels as K
from .estimators import ScalingReport, ensemble_aggregate, tail_liminf_limsup
from .processes import BallSchedule


class FinitenessError(ValueError):
    """Targets would meet infinitely many partition cells."""


@dataclass(frozen=True)
class TowerSpec:
    beta: float
    i_max: int = 10**7
    cum: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if not 0 < self.beta < 1:
            raise ValueError("beta must lie in (0, 1)")
        if self.i_max < 2:
            raise ValueError("i_max must be >= 2")
        i = np.arange(1, self.i_max, dtype=float)
        ell = i ** (-self.beta - 1.0) / zeta(self.beta + 1.0)
        cum = np.empty(self.i_max + 1)
        cum[0] = 0.0
        np.cumsum(ell, out=cum[1:-1])
        cum[-1] = 1.0
        object.__setattr__(self, "cum", cum)

    @property
    def lengths(self) -> np.ndarray:
        return np.diff(self.cum)

    @property
    def folded_mass(self) -> float:
        """Mass of the branches beyond i_max that the last branch absorbed."""
        return float(1.0 - self.cum[-2] - self.i_max ** (-self.beta - 1.0) / zeta(self.beta + 1.0))

    def analytic_length(self, i) -> np.ndarray:
        return np.asarray(i, dtype=float) ** (-self.beta - 1.0) / zeta(self.beta + 1.0)

    def branch_of(self, x: float) -> int:
        return int(np.searchsorted(self.cum, x, side="right"))

    def check_center(self, center: float):
        """Shrinking targets around ``center`` must end up in finitely many cells.

        That fails when the center is the accumulation point 1 or sits in
        the folded tail branch, which stands in for infinitely many cells.
        """
        if not 0.0 <= center < 1.0:
            raise FinitenessError("target center must lie in [0, 1)")
        if self.branch_of(center) >= self.i_max:
            raise FinitenessError(
                f"center {center} lies in the folded tail branch; shrinking targets "
                "there meet infinitely many partition cells"
            )


@dataclass(frozen=True)
class TowerPoint:
    base: float
    level: int = 0


def tower_step(spec: TowerSpec, p: TowerPoint) -> TowerPoint:
    """Climb one level, or apply the base map and return to level 0."""
    k = spec.branch_of(p.base)
    if not 0 <= p.level < k:
        raise ValueError("level must be below the return time of its branch")
    if p.level + 1 < k:
        return TowerPoint(p.base, p.level + 1)
    a, b = spec.cum[k - 1], spec.cum[k]
    return TowerPoint((p.base - a) / (b - a), 0)


def return_sequence(spec: TowerSpec, x0: float, n_returns: int, seed: int = 0) -> np.ndarray:
    """Return times R of successive level-0 visits."""
    rng = np.array([seed], dtype=np.uint64)
    out = np.empty(n_returns, dtype=np.int64)
    x = x0
    for j in range(n_returns):
        x, k = K.tower_base_step(x, spec.cum, rng)
        out[j] = k
    return out


def bc_counts(spec: TowerSpec, x0: float, checkpoints: np.ndarray, center: float,
              zeta_exp: float, seed: int = 0, clock: bool = False) -> np.ndarray:
    """sum_{k=1}^{n} 1_{B_k}(F^k p) at each checkpoint, p = (x0, level 0).

    B_k is the level-0 base interval of length k^-zeta around ``center``.
    ``clock=True`` steps the tower level by level, otherwise level-0
    visits are found by return-time bookkeeping; both give the same counts.
    """
    cps = np.asarray(checkpoints, dtype=np.int64)
    out = np.zeros(cps.size, dtype=np.int64)
    rng = np.array([seed], dtype=np.uint64)
    n_max = int(cps[-1])
    if clock:
        K.tower_bc_clock(x0, n_max, spec.cum, rng, center, zeta_exp, cps, out)
    else:
        K.tower_bc_returns(x0, n_max, spec.cum, rng, center, zeta_exp, cps, out)
    return out


def tower_bc_experiment(spec: TowerSpec, center: float, zeta_exp: float, eps: float,
                        checkpoints: np.ndarray, ensemble: int, seed: int,
                        liminf_min: float = 0.9, min_fraction: float = 0.9,
                        window: float = 0.25) -> tuple[ScalingReport, list]:
    """Ensemble sandwich test of hits on shrinking level-0 targets.

    The lower series is sum_{k <= n^(1/(a+eps))} mu(B_{k^(a+eps)}) with
    a = 1/beta, and an orbit passes when the tail liminf of count / lower
    is at least ``liminf_min``.  Returns the report and per-orbit count
    arrays.
    """
    spec.check_center(center)
    a = 1.0 / spec.beta
    sched = BallSchedule(center, zeta_exp)
    cps = np.asarray(checkpoints, dtype=np.int64)
    lower = np.array([sched.measure_sum(n, a + eps) for n in cps])
    upper = np.array([sched.measure_sum(n, a - eps) for n in cps])
    ss = np.random.SeedSequence(seed)
    lows, passes, ups, counts = [], [], [], []
    for i, child in enumerate(ss.spawn(ensemble)):
        g = np.random.default_rng(child)
        x0 = float(g.random())
        c = bc_counts(spec, x0, cps, center, zeta_exp, seed=int(g.integers(0, 2**63)))
        counts.append(c)
        keep = lower > 0
        ratio = c[keep] / lower[keep]
        tail = tail_liminf_limsup(cps[keep], ratio, window=window)
        lows.append(tail.lo)
        passes.append(tail.lo >= liminf_min)
        ups.append(bool(c[-1] <= upper[-1]))
    rep = ensemble_aggregate(
        lows, passes, experiment="tower-bc", statistic="tail liminf of count / lower series",
        min_fraction=min_fraction, predicted=1.0,
        tolerance={"liminf_min": liminf_min},
        details={"upper_bound_fraction": float(np.mean(ups)), "folded_mass": spec.folded_mass,
                 "lower_series_final": float(lower[-1]), "upper_series_final": float(upper[-1])},
    )
    return rep, counts
