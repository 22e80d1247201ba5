"""Scaling exponents and oscillation verdicts from traces."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Sequence

import numpy as np
from scipy import stats

from .traces import HittingRecord, ProcessTrace

DEFAULT_WINDOW = 0.25
OSCILLATION_THRESHOLD = 0.25


class EstimatorError(ValueError):
    pass


def _select_window(n: np.ndarray, window=DEFAULT_WINDOW) -> np.ndarray:
    """Mask of checkpoints in the window.

    ``window`` is either a top fraction of the log n range or an explicit
    ``(n_lo, n_hi)`` pair.
    """
    n = np.asarray(n, dtype=float)
    if isinstance(window, (tuple, list)):
        lo, hi = window
        return (n >= lo) & (n <= hi)
    ln = np.log(n)
    cut = ln[-1] - window * (ln[-1] - ln[0])
    return ln >= cut - 1e-12


@dataclass(frozen=True)
class SlopeFit:
    slope: float
    stderr: float
    n_points: int
    n_lo: int
    n_hi: int


def loglog_slope(trace, window=DEFAULT_WINDOW, min_points: int = 8) -> SlopeFit:
    """OLS slope of log value against log n over the window."""
    n, v = _unpack(trace)
    mask = _select_window(n, window)
    n, v = n[mask], v[mask]
    if n.size < min_points:
        raise EstimatorError(f"{n.size} checkpoints in the window, need {min_points}")
    if np.any(v <= 0):
        raise EstimatorError("log-log fit needs positive values")
    x, y = np.log(n.astype(float)), np.log(v.astype(float))
    if np.ptp(y) == 0:
        return SlopeFit(0.0, 0.0, int(n.size), int(n[0]), int(n[-1]))
    res = stats.linregress(x, y)
    return SlopeFit(float(res.slope), float(res.stderr), int(n.size), int(n[0]), int(n[-1]))


def local_slopes(trace, window=DEFAULT_WINDOW) -> np.ndarray:
    """Consecutive-checkpoint slopes d log v / d log n inside the window.

    The OLS slope over the same window is a weighted mean of these, so it
    always lies between their min and max.
    """
    n, v = _unpack(trace)
    mask = _select_window(n, window)
    x, y = np.log(n[mask].astype(float)), np.log(v[mask].astype(float))
    return np.diff(y) / np.diff(x)


@dataclass(frozen=True)
class TailEstimate:
    lo: float
    hi: float
    n_at_lo: int
    n_at_hi: int
    window: tuple[int, int]

    @property
    def gap(self) -> float:
        return self.hi - self.lo

    def oscillates(self, threshold: float = OSCILLATION_THRESHOLD) -> bool:
        return self.gap > threshold


def tail_liminf_limsup(checkpoints, ratios, window=DEFAULT_WINDOW,
                       min_points: int = 12) -> TailEstimate:
    """Min and max of a ratio sequence over the tail window."""
    n = np.asarray(checkpoints)
    r = np.asarray(ratios, dtype=float)
    if n.size < min_points:
        raise EstimatorError(f"{n.size} checkpoints, need {min_points}")
    mask = _select_window(n, window)
    nw, rw = n[mask], r[mask]
    i, j = int(np.argmin(rw)), int(np.argmax(rw))
    return TailEstimate(float(rw[i]), float(rw[j]), int(nw[i]), int(nw[j]),
                        (int(nw[0]), int(nw[-1])))


def log_ratio(trace) -> tuple[np.ndarray, np.ndarray]:
    """log value / log n at checkpoints n >= 2."""
    n, v = _unpack(trace)
    keep = n >= 2
    return n[keep], np.log(v[keep].astype(float)) / np.log(n[keep].astype(float))


def _unpack(trace):
    if isinstance(trace, ProcessTrace):
        return trace.checkpoints, trace.values
    n, v = trace
    return np.asarray(n), np.asarray(v)


# ---------------------------------------------------------------- tables


class TabulatedFunction:
    """A strictly monotone function given on a grid.

    Interpolation is linear in log-log coordinates when grid and values are
    positive (exact for power laws), otherwise linear; outside the grid the
    end segments are extended.
    """

    def __init__(self, grid, values, mode: str = "auto"):
        g = np.asarray(grid, dtype=float)
        v = np.asarray(values, dtype=float)
        if g.ndim != 1 or g.shape != v.shape or g.size < 2:
            raise ValueError("grid and values must be 1-d arrays of equal length >= 2")
        if np.any(np.diff(g) <= 0):
            raise ValueError("grid must be strictly increasing")
        dv = np.diff(v)
        if np.all(dv > 0):
            self.decreasing = False
        elif np.all(dv < 0):
            self.decreasing = True
        else:
            raise ValueError("non-monotone table: values must be strictly monotone")
        if mode == "auto":
            mode = "loglog" if (np.all(g > 0) and np.all(v > 0)) else "linear"
        self.mode = mode
        self.grid, self.values = g, v

    @property
    def increasing(self) -> bool:
        return not self.decreasing

    def _fwd(self, a):
        return np.log(a) if self.mode == "loglog" else a

    def _back(self, a):
        return np.exp(a) if self.mode == "loglog" else a

    @staticmethod
    def _interp(x, xs, ys):
        # np.interp with linear extension past both ends
        y = np.interp(x, xs, ys)
        lo = x < xs[0]
        hi = x > xs[-1]
        if np.any(lo):
            s = (ys[1] - ys[0]) / (xs[1] - xs[0])
            y = np.where(lo, ys[0] + s * (x - xs[0]), y)
        if np.any(hi):
            s = (ys[-1] - ys[-2]) / (xs[-1] - xs[-2])
            y = np.where(hi, ys[-1] + s * (x - xs[-1]), y)
        return y

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            out = self._back(self._interp(self._fwd(x), self._fwd(self.grid), self._fwd(self.values)))
        return out if out.ndim else float(out)

    def inverse(self, u):
        vals, grid = self.values, self.grid
        if self.decreasing:
            vals, grid = vals[::-1], grid[::-1]
        u = np.asarray(u, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            out = self._back(self._interp(self._fwd(u), self._fwd(vals), self._fwd(grid)))
        return out if out.ndim else float(out)


def invert_monotone_bound(bound: TabulatedFunction, shift: float) -> TabulatedFunction:
    """G(u) = bound^{-1}(u + shift), tabulated on the shifted value grid.

    With shift = -1 this is the lower bound l_2^{-1}(u - 1) for tau_u and
    with shift = +1 the upper bound l_1^{-1}(u + 1).
    """
    if not isinstance(bound, TabulatedFunction):
        raise TypeError("bound must be a TabulatedFunction")
    if bound.decreasing:
        raise ValueError("non-monotone table: the bound must be increasing")
    u = bound.values - shift
    mode = "loglog" if (bound.mode == "loglog" and np.all(u > 0)) else "linear"
    return TabulatedFunction(u, bound.grid, mode=mode)


# ---------------------------------------------------------------- hitting


def hitting_indicators(record: HittingRecord, min_resolved: int = 10,
                       tail: float = 1.0) -> tuple[float, float]:
    """(H_bar, H_under): max and min of log tau_r / -log r over resolved radii.

    ``tail`` keeps that fraction of the resolved radii, smallest first.
    Radii with tau_r = 0 carry no information and are skipped.
    """
    r, t = _resolved(record, min_resolved)
    k = max(min_resolved, int(math.ceil(tail * r.size)))
    r, t = r[-k:], t[-k:]
    ratio = np.log(t) / -np.log(r)
    return float(ratio.max()), float(ratio.min())


def hitting_exponent(record: HittingRecord, min_resolved: int = 8) -> SlopeFit:
    """OLS slope of log tau_r against -log r over the resolved radii."""
    r, t = _resolved(record, min_resolved)
    res = stats.linregress(-np.log(r), np.log(t))
    return SlopeFit(float(res.slope), float(res.stderr), int(r.size), int(t[0]), int(t[-1]))


def median_hitting_exponent(records: Sequence[HittingRecord], min_levels: int = 5) -> SlopeFit:
    """OLS slope of log median_orbits(tau_r) against -log r.

    A censored time counts as +inf.  The median is then exact wherever
    fewer than half the orbits are censored, so unlike per-orbit fits,
    which only see the small radii on orbits that happened to hit them
    early, this exponent is free of censoring bias.  Radii where more than
    half the orbits are censored, or where the median is 0, are dropped.
    """
    levels = records[0].levels
    if any(not np.array_equal(r.levels, levels) for r in records):
        raise ValueError("records must share one radius grid")
    tau = np.array([np.where(r.tau < 0, np.inf, r.tau.astype(float)) for r in records])
    med = np.median(tau, axis=0)
    keep = np.isfinite(med) & (med > 0)
    if keep.sum() < min_levels:
        raise EstimatorError(f"{int(keep.sum())} radii with a finite median, need {min_levels}")
    x = -np.log(levels[keep]) if records[0].kind == "radius" else levels[keep]
    res = stats.linregress(x, np.log(med[keep]))
    n = np.flatnonzero(keep)
    return SlopeFit(float(res.slope), float(res.stderr), int(keep.sum()), int(n[0]), int(n[-1]))


def _resolved(record: HittingRecord, min_resolved: int):
    order = np.argsort(record.levels)[::-1]  # largest radius first
    r = record.levels[order]
    t = record.tau[order]
    keep = t > 0
    r, t = r[keep], t[keep].astype(float)
    if r.size < min_resolved:
        raise EstimatorError(f"too censored: {r.size} resolved radii, need {min_resolved}")
    return r, t


def indicators_from_min_distance(checkpoints, d_n, window=1.0) -> tuple[float, float]:
    """(H_bar, H_under) from the running minimum distance.

    H_under = 1 / limsup(-log d_n / log n), H_bar = 1 / liminf(...).
    """
    n = np.asarray(checkpoints, dtype=float)
    d = np.asarray(d_n, dtype=float)
    keep = (n >= 2) & (d > 0)
    n, d = n[keep], d[keep]
    mask = _select_window(n, window)
    q = -np.log(d[mask]) / np.log(n[mask])
    return float(1.0 / q.min()), float(1.0 / q.max())


# ---------------------------------------------------------------- reports


@dataclass
class ScalingReport:
    """Ensemble summary of one experiment statistic."""

    experiment: str
    statistic: str
    values: list
    median: float
    iqr: float
    pass_fraction: float
    passed: bool
    predicted: float | None = None
    citation: str = ""
    tolerance: dict = field(default_factory=dict)
    fitted_slope: float | None = None
    stderr: float | None = None
    tail_lo: float | None = None
    tail_hi: float | None = None
    details: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.tail_lo is not None and self.tail_hi is not None and self.tail_lo > self.tail_hi:
            raise ValueError("tail_lo exceeds tail_hi")

    def to_dict(self) -> dict:
        return _jsonable(asdict(self))


def _jsonable(o):
    if isinstance(o, dict):
        return {str(k): _jsonable(v) for k, v in o.items()}
    if isinstance(o, (list, tuple)):
        return [_jsonable(v) for v in o]
    if isinstance(o, np.ndarray):
        return [_jsonable(v) for v in o.tolist()]
    if isinstance(o, (np.floating, float)):
        f = float(o)
        return f if math.isfinite(f) else repr(f)
    if isinstance(o, (np.integer,)):
        return int(o)
    if isinstance(o, np.bool_):
        return bool(o)
    return o


def ensemble_aggregate(values: Sequence[float], passes: Sequence[bool] | None = None,
                       *, experiment: str = "", statistic: str = "",
                       median_range: tuple[float, float] | None = None,
                       min_fraction: float | None = None, min_orbits: int = 20,
                       **meta) -> ScalingReport:
    """Median, IQR and pass fraction of per-orbit values.

    The experiment passes when the median lies in ``median_range`` (if
    given) and the per-orbit pass fraction reaches ``min_fraction`` (if
    given).
    """
    v = np.asarray(values, dtype=float)
    if v.size < min_orbits:
        raise EstimatorError(f"{v.size} orbits, need at least {min_orbits}")
    med = float(np.median(v))
    with np.errstate(invalid="ignore"):  # inf values (censored) give an inf or nan IQR
        q75, q25 = np.percentile(v, [75, 25])
    frac = float(np.mean(np.asarray(passes, dtype=bool))) if passes is not None else 1.0
    ok = True
    tol = dict(meta.pop("tolerance", {}))
    if median_range is not None:
        ok &= median_range[0] <= med <= median_range[1]
        tol["median_range"] = list(median_range)
    if min_fraction is not None:
        ok &= frac >= min_fraction
        tol["min_fraction"] = min_fraction
    return ScalingReport(experiment=experiment, statistic=statistic, values=v.tolist(),
                         median=med, iqr=float(q75 - q25), pass_fraction=frac,
                         passed=bool(ok), tolerance=tol, **meta)
