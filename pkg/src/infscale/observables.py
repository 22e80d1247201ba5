"""Observables ``phi = psi(d(x, xtilde))`` and their suplevel exponents.

An observable is evaluated either on a single :class:`Point` (``eval``) or,
vectorised, on a block of engine states (``values``).  The ``coords``
selector says which coordinates enter the distance:

``"base"``    absolute difference on the base interval
``"fiber0"``  circle distance on the first fiber (``"fiber1"`` likewise)
``"fibers"``  max of the fiber circle distances
``"all"``     max over base and fibers
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np
from scipy import stats

from . import _kernels as K
from .diophantine import FIXED_ONE
from .dynamics import InducedSystem, Point, States
from .estimators import TabulatedFunction

MASK64 = (1 << 64) - 1


@dataclass(frozen=True)
class Target:
    """Reference point x~ together with the coordinates the metric uses."""

    point: Point
    coords: str = "base"

    def __post_init__(self):
        if self.coords not in ("base", "fiber0", "fiber1", "fibers", "all"):
            raise ValueError(f"unknown coords selector {self.coords!r}")

    def _fiber_ids(self) -> list[int]:
        nf = len(self.point.fibers)
        ids = {"base": [], "fiber0": [0], "fiber1": [1]}.get(self.coords, list(range(nf)))
        if any(i >= nf for i in ids):
            raise ValueError("target point lacks the fibers named by coords")
        return ids

    def distance(self, p: Point) -> float:
        parts = []
        if self.coords in ("base", "all"):
            parts.append(abs(p.base - self.point.base))
        for i in self._fiber_ids():
            diff = (p.fibers[i] - self.point.fibers[i]) % FIXED_ONE
            parts.append(float(Fraction(min(diff, FIXED_ONE - diff), FIXED_ONE)))
        return max(parts)

    def distances(self, st: States) -> np.ndarray:
        out = None
        if self.coords in ("base", "all"):
            out = np.abs(st.base - self.point.base)
        for i in self._fiber_ids():
            f = self.point.fibers[i]
            d = np.empty(len(st))
            K.fiber_distances(np.ascontiguousarray(st.fib_hi[:, i]),
                              np.ascontiguousarray(st.fib_lo[:, i]),
                              np.uint64(f >> 64), np.uint64(f & MASK64), d)
            out = d if out is None else np.maximum(out, d)
        return out


def _as_target(xtilde, coords: str) -> Target:
    if isinstance(xtilde, Target):
        return xtilde
    if isinstance(xtilde, Point):
        return Target(xtilde, coords)
    return Target(Point(float(xtilde)), coords)


class Observable:
    """Base class; subclasses define ``psi`` on distances."""

    alpha_phi: float | None = None

    def eval(self, p: Point) -> float:
        d = self.target.distance(p)
        return float(self.psi(np.array([d]))[0])

    def values(self, st: States) -> np.ndarray:
        return self.psi(self.target.distances(st))

    def psi(self, d: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def ball_radius(self, u: float) -> float:
        """Radius r with {phi >= u} = closed ball B(x~, r)."""
        raise NotImplementedError


@dataclass
class DistPower(Observable):
    """phi = d(x, x~)^-k.

    ``local_dim`` is d_mu(x~) when known; then alpha_phi = d_mu(x~) / k.
    """

    xtilde: object
    k: float = 1.0
    local_dim: float | None = None
    coords: str = "base"
    target: Target = field(init=False, repr=False)

    def __post_init__(self):
        if self.k <= 0:
            raise ValueError("k must be > 0")
        self.target = _as_target(self.xtilde, self.coords)
        self.alpha_phi = None if self.local_dim is None else self.local_dim / self.k

    def psi(self, d):
        d = np.asarray(d, dtype=float)
        out = np.full(d.shape, np.inf)
        pos = d > 0
        out[pos] = 1.0 / d[pos] if self.k == 1.0 else d[pos] ** (-self.k)
        return out

    def ball_radius(self, u):
        return u ** (-1.0 / self.k)


@dataclass
class NegLogDist(Observable):
    """phi = -log d(x, x~)."""

    xtilde: object
    local_dim: float | None = None
    coords: str = "base"
    target: Target = field(init=False, repr=False)

    def __post_init__(self):
        self.target = _as_target(self.xtilde, self.coords)
        self.alpha_phi = 0.0  # mu{phi >= n} decays like e^{-n d}, faster than any power

    def psi(self, d):
        with np.errstate(divide="ignore"):
            return -np.log(d)

    def ball_radius(self, u):
        return math.exp(-u)


@dataclass
class PsiOfDist(Observable):
    """phi = psi(d(x, x~)) with psi strictly decreasing and tabulated."""

    xtilde: object
    table: TabulatedFunction
    coords: str = "base"
    alpha_phi: float | None = None
    target: Target = field(init=False, repr=False)

    def __post_init__(self):
        if not self.table.decreasing:
            raise ValueError("psi must be strictly decreasing on its grid")
        self.target = _as_target(self.xtilde, self.coords)

    @classmethod
    def from_callable(cls, xtilde, psi: Callable[[np.ndarray], np.ndarray],
                      d_min=1e-300, d_max=1.0, n=2001, **kw):
        grid = np.geomspace(d_min, d_max, n)
        return cls(xtilde, TabulatedFunction(grid, psi(grid)), **kw)

    def psi(self, d):
        out = self.table(np.maximum(d, 0.0))
        return np.where(d > 0, out, np.inf)

    def ball_radius(self, u):
        return float(self.table.inverse(u))


@dataclass
class BallIndicator(Observable):
    """1 on the closed ball B(center, radius), 0 elsewhere."""

    center: object
    radius: float
    coords: str = "base"
    target: Target = field(init=False, repr=False)

    def __post_init__(self):
        self.target = _as_target(self.center, self.coords)

    def psi(self, d):
        return (d <= self.radius).astype(float)


@dataclass
class ReturnTime:
    """phi = R, the first return time to Y = [1/2, 1) of the LSV map."""

    system: InducedSystem

    @property
    def alpha_phi(self) -> float:
        return 1.0 / self.system.alpha

    def eval(self, p: Point) -> float:
        if not 0.5 <= p.base < 1.0:
            raise ValueError("ReturnTime is defined on Y = [1/2, 1)")
        return float(self.system.return_time(p.base))


@dataclass
class SymbolicCodingDist:
    """phi = n*(x, s): index of the first binary digit where x leaves ``s``.

    Large values mean x is close to the target sequence in the symbolic
    metric d~ = 2^-n*.  Digits beyond ``depth`` are not inspected.
    """

    symbols: tuple[int, ...]
    depth: int = 52

    def eval(self, p: Point) -> float:
        digits = binary_digits(p.base, min(self.depth, len(self.symbols)))
        for i, (a, b) in enumerate(zip(digits, self.symbols), start=1):
            if a != b:
                return float(i)
        return float(len(digits) + 1)


# ---------------------------------------------------------------- symbolic


def binary_digits(x: float, depth: int, strict: bool = False) -> list[int]:
    """Digits x_i = 1 iff T^{i-1} x in [1/2, 1), T the doubling map.

    With ``strict``, hitting 0 or 1/2 exactly during extraction (a dyadic
    point) raises ``ValueError``.
    """
    fr = Fraction(x)
    out = []
    for _ in range(depth):
        if strict and (fr == 0 or fr == Fraction(1, 2)):
            raise ValueError(f"dyadic input {x}: digit extraction reached {fr}")
        if fr >= Fraction(1, 2):
            out.append(1)
            fr = 2 * fr - 1
        else:
            out.append(0)
            fr = 2 * fr
    return out


@dataclass(frozen=True)
class SymbolicDistance:
    value: float
    n_star: int
    truncated: bool


def symbolic_coding_distance(x: float, y: float, depth: int = 52,
                             strict: bool = True) -> SymbolicDistance:
    """d~(x, y) = 2^-n*, n* the first index where the binary codings differ.

    If the first ``depth`` digits agree the result is 2^-depth flagged as
    truncated.  Dyadic inputs that reach 0 or 1/2 before the digits
    separate raise ``ValueError`` when ``strict``.
    """
    fx, fy = Fraction(x), Fraction(y)
    half = Fraction(1, 2)
    for i in range(1, depth + 1):
        a, b = int(fx >= half), int(fy >= half)
        if a != b:
            return SymbolicDistance(2.0**-i, i, False)
        if strict and (fx in (0, half) or fy in (0, half)):
            raise ValueError("dyadic input reached 0 or 1/2 during digit extraction")
        fx = 2 * fx - a
        fy = 2 * fy - b
    return SymbolicDistance(2.0**-depth, depth, True)


# ---------------------------------------------------------------- exponents


def local_dimension_lsv(alpha: float, xtilde: float) -> float | None:
    """d_mu(x~) for the LSV invariant measure; None where undefined.

    1 away from 0; 1 - alpha at 0 in the finite-measure regime.  At 0 with
    alpha >= 1 the measure of small balls is infinite.
    """
    if xtilde != 0.0:
        return 1.0
    return 1.0 - alpha if alpha < 1 else None


def alpha_phi_empirical(obs, sampler: Callable[[int], np.ndarray],
                        levels: Sequence[float], n_samples: int = 10**6,
                        min_top: int = 100) -> float:
    """Slope of log mu(phi >= n) against -log n over the level grid.

    ``sampler(n)`` returns n points (base coordinates) from the reference
    measure; ``obs`` must offer ``psi`` on distances or a vector ``eval``.
    """
    pts = np.asarray(sampler(n_samples), dtype=float)
    levels = np.asarray(levels, dtype=float)
    if isinstance(obs, ReturnTime):
        vals = obs.system.return_times_capped(pts, int(math.ceil(levels.max()))).astype(float)
    else:
        vals = obs.psi(np.abs(pts - obs.target.point.base))
    counts = np.array([(vals >= u).sum() for u in levels])
    if counts[-1] < min_top:
        raise ValueError(
            f"insufficient tail mass: {counts[-1]} samples in the top level, need {min_top}"
        )
    res = stats.linregress(-np.log(levels), np.log(counts / pts.size))
    return float(res.slope)
