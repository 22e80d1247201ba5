"""Concrete maps, the checkpointed orbit engine and the LSV induced system.

Maps
----
``LSV(alpha)``
    ``x (1 + 2^alpha x^alpha)`` on [0, 1/2) and ``2x - 1`` on [1/2, 1].
``Doubling``, ``Tent``
    ``2x mod 1`` and ``1 - |2x - 1|``.
``CircleRotation(theta)``
    ``t -> t + theta`` on the circle; the state lives in fiber 0.
``SkewDoublingCircle(theta)``, ``SkewDoublingTorus2(theta1, theta2)``
    doubling on the base, fibers rotated only when the base is in [1/2, 1].

Number formats
--------------
The LSV base is iterated in float64, literally as written.  The doubling
and tent maps are iterated on a 64-bit fixed-point state into which one
pseudo-random binary digit is shifted per step.  This is exact iteration
of a point whose digits beyond the 64th are drawn from the orbit seed;
plain float64 doubling would collapse onto 0 after 53 steps.  Circle
fibers are 128-bit fixed-point fractions held as (hi, lo) uint64 pairs.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Sequence, Union

import numpy as np

from . import _kernels as K
from .diophantine import FIXED_BITS, FIXED_ONE, ContinuedFraction, fixed_angle

MASK64 = (1 << 64) - 1


# ---------------------------------------------------------------- map specs


@dataclass(frozen=True)
class LSV:
    alpha: float

    def __post_init__(self):
        if not self.alpha >= 0:
            raise ValueError("LSV alpha must be >= 0")
        object.__setattr__(self, "alpha", float(self.alpha))

    @property
    def infinite_measure(self) -> bool:
        return self.alpha >= 1.0

    @property
    def c(self) -> float:
        return 2.0**self.alpha


@dataclass(frozen=True)
class Doubling:
    pass


@dataclass(frozen=True)
class Tent:
    pass


@dataclass(frozen=True)
class CircleRotation:
    theta: ContinuedFraction


@dataclass(frozen=True)
class SkewDoublingCircle:
    theta: ContinuedFraction


@dataclass(frozen=True)
class SkewDoublingTorus2:
    theta1: ContinuedFraction
    theta2: ContinuedFraction


MapSpec = Union[LSV, Doubling, Tent, CircleRotation, SkewDoublingCircle, SkewDoublingTorus2]


def map_code(m: MapSpec) -> int:
    return {
        LSV: K.LSV,
        Doubling: K.DOUBLING,
        Tent: K.TENT,
        CircleRotation: K.ROTATION,
        SkewDoublingCircle: K.SKEW1,
        SkewDoublingTorus2: K.SKEW2,
    }[type(m)]


def n_fibers(m: MapSpec) -> int:
    if isinstance(m, (CircleRotation, SkewDoublingCircle)):
        return 1
    if isinstance(m, SkewDoublingTorus2):
        return 2
    return 0


def angles(m: MapSpec) -> tuple[ContinuedFraction, ...]:
    if isinstance(m, (CircleRotation, SkewDoublingCircle)):
        return (m.theta,)
    if isinstance(m, SkewDoublingTorus2):
        return (m.theta1, m.theta2)
    return ()


# ---------------------------------------------------------------- points


@dataclass(frozen=True)
class Point:
    """A state: base coordinate plus 0-2 fibers as 128-bit fractions."""

    base: float
    fibers: tuple[int, ...] = ()

    def __post_init__(self):
        b = float(self.base)
        if not 0.0 <= b <= 1.0:
            raise ValueError(f"base coordinate {b} outside [0, 1]")
        for f in self.fibers:
            if not 0 <= f < FIXED_ONE:
                raise ValueError("fiber must be a 128-bit fixed-point fraction")
        object.__setattr__(self, "base", b)
        object.__setattr__(self, "fibers", tuple(int(f) for f in self.fibers))

    @classmethod
    def from_floats(cls, base: float, *fibers: float) -> "Point":
        return cls(base, tuple(int(Fraction(t) * FIXED_ONE) % FIXED_ONE for t in fibers))

    def fiber_float(self, i: int) -> float:
        return float(Fraction(self.fibers[i], FIXED_ONE))


def step(m: MapSpec, p: Point) -> Point:
    """One application of the map, in plain float arithmetic for the base."""
    x = p.base
    if isinstance(m, LSV):
        return Point(float(K.lsv_f(x, m.alpha, m.c)), p.fibers)
    if isinstance(m, Tent):
        return Point(1.0 - abs(2.0 * x - 1.0), p.fibers)
    if isinstance(m, CircleRotation):
        th = fixed_angle(m.theta)
        return Point(x, ((p.fibers[0] + th) % FIXED_ONE,))
    # doubling and the skew products
    y = 2.0 * x
    y = y - 1.0 if y >= 1.0 else y
    fibers = p.fibers
    if x >= 0.5 and fibers:
        fibers = tuple((f + fixed_angle(a)) % FIXED_ONE for f, a in zip(fibers, angles(m)))
    return Point(y, fibers)


def is_bad_seed(m: MapSpec, x: float) -> bool:
    """Dyadic rationals and fixed points are rejected as initial conditions."""
    if isinstance(m, LSV):
        if x in (0.0, 1.0):
            return True
    if isinstance(m, Tent) and abs(x - 2.0 / 3.0) < 1e-15:
        return True
    fr = Fraction(x)
    # short dyadic expansions die under doubling-type dynamics
    return fr.denominator <= 1 << 20


def random_point(m: MapSpec, rng: np.random.Generator, region=(0.0, 1.0)) -> Point:
    """Uniform random initial condition, redrawn on dyadic or fixed points."""
    lo, hi = region
    while True:
        x = float(lo + (hi - lo) * rng.random())
        if not is_bad_seed(m, x) and lo <= x < hi:
            break
    nf = n_fibers(m)
    fibers = tuple(int(rng.integers(0, 1 << 63)) << 65 | int(rng.integers(0, 1 << 63)) for _ in range(nf))
    fibers = tuple(f % FIXED_ONE for f in fibers)
    if isinstance(m, CircleRotation):
        x = 0.0
    return Point(x, fibers)


# ---------------------------------------------------------------- schedule


@dataclass(frozen=True)
class CheckpointSchedule:
    """Geometric times ``ceil(ratio^k)``, deduplicated, plus ``n_max``."""

    n_max: int
    ratio: float = 1.2
    times: tuple[int, ...] = field(default=(), compare=False)

    def __post_init__(self):
        if self.ratio <= 1:
            raise ValueError("ratio must be > 1")
        if self.n_max < 0:
            raise ValueError("n_max must be >= 0")
        if self.times:
            t = tuple(int(v) for v in self.times)
            if any(b <= a for a, b in zip(t, t[1:])) or t[0] < 1 or t[-1] != self.n_max:
                raise ValueError("explicit times must increase from >= 1 to n_max")
            object.__setattr__(self, "times", t)
            return
        out = []
        if self.n_max >= 1:
            k = 0
            while True:
                v = math.ceil(self.ratio**k)
                if v >= self.n_max:
                    break
                if not out or v > out[-1]:
                    out.append(v)
                k += 1
            out.append(int(self.n_max))
        object.__setattr__(self, "times", tuple(out))

    @classmethod
    def explicit(cls, times: Sequence[int]) -> "CheckpointSchedule":
        times = tuple(int(t) for t in times)
        return cls(times[-1] if times else 0, 2.0, times)

    def __iter__(self):
        return iter(self.times)

    def __len__(self):
        return len(self.times)

    def array(self) -> np.ndarray:
        return np.asarray(self.times, dtype=np.int64)


# ---------------------------------------------------------------- engine


@dataclass
class States:
    """A block of consecutive orbit states starting at clock time ``t0``."""

    t0: int
    base: np.ndarray
    fib_hi: np.ndarray
    fib_lo: np.ndarray

    def __len__(self):
        return self.base.shape[0]

    def slice(self, a: int, b: int) -> "States":
        return States(self.t0 + a, self.base[a:b], self.fib_hi[a:b], self.fib_lo[a:b])

    def copy(self) -> "States":
        return States(self.t0, self.base.copy(), self.fib_hi.copy(), self.fib_lo.copy())

    def times(self) -> np.ndarray:
        return np.arange(self.t0, self.t0 + len(self), dtype=np.int64)


class SingularHit(RuntimeError):
    """The orbit landed exactly on the singular point of an observable."""

    def __init__(self, t: int):
        super().__init__(f"orbit hit the singular point at clock time {t}")
        self.t = t


class Orbit:
    """Stateful forward iterator producing :class:`States` blocks."""

    def __init__(self, m: MapSpec, p0: Point, refresh_seed: int = 0):
        self.map = m
        self.code = map_code(m)
        nf = n_fibers(m)
        if len(p0.fibers) != nf:
            raise ValueError(f"{type(m).__name__} needs {nf} fiber coordinate(s)")
        self.alpha = float(getattr(m, "alpha", 0.0))
        self.c = 2.0**self.alpha
        th = [fixed_angle(a) for a in angles(m)] or [0]
        self.theta_hi = np.array([t >> 64 for t in th], dtype=np.uint64)
        self.theta_lo = np.array([t & MASK64 for t in th], dtype=np.uint64)
        self.xf = np.array([p0.base])
        base = p0.base
        if self.code != K.LSV and base >= 1.0:
            base = 0.0 if self.code != K.TENT else 1.0
        s = int(Fraction(base) * (1 << 64))
        if self.code == K.TENT and base >= 1.0:
            s = MASK64
        self.s = np.array([s & MASK64], dtype=np.uint64)
        self.fhi = np.array([f >> 64 for f in p0.fibers], dtype=np.uint64)
        self.flo = np.array([f & MASK64 for f in p0.fibers], dtype=np.uint64)
        self.rng = np.array([refresh_seed & MASK64], dtype=np.uint64)
        self.bits = np.zeros(2, dtype=np.uint64)
        self.nf = nf
        self.t = 0

    def block(self, n: int) -> States:
        base = np.empty(n)
        hi = np.empty((n, self.nf), dtype=np.uint64)
        lo = np.empty((n, self.nf), dtype=np.uint64)
        K.advance(self.code, self.alpha, self.c, self.theta_hi, self.theta_lo,
                  self.xf, self.s, self.fhi, self.flo, self.rng, self.bits, base, hi, lo)
        st = States(self.t, base, hi, lo)
        self.t += n
        return st

    def point(self) -> Point:
        if self.code == K.LSV:
            base = float(self.xf[0])
        elif self.code == K.ROTATION:
            base = 0.0
        else:
            base = float(int(self.s[0]) >> 11) * 2.0**-53
        fibers = tuple((int(h) << 64) | int(l) for h, l in zip(self.fhi, self.flo))
        return Point(base, fibers)


def iterate_with_checkpoints(m: MapSpec, p0: Point, sched: CheckpointSchedule,
                             monitors: Sequence, refresh_seed: int = 0,
                             chunk: int = 1 << 16) -> list:
    """Single forward pass feeding every monitor; returns their results.

    States 0..n are delivered before a monitor records checkpoint n; each
    monitor decides which of them its process uses.
    """
    for mon in monitors:
        mon.start(sched)
    if sched.n_max == 0 or not len(sched):
        return [mon.result() for mon in monitors]
    orbit = Orbit(m, p0, refresh_seed)
    cps = sched.times
    ci = 0
    while ci < len(cps):
        if all(getattr(mon, "done", False) for mon in monitors):
            # every monitor is final (e.g. all targets hit): values are frozen
            for n in cps[ci:]:
                for mon in monitors:
                    mon.record(n)
            break
        target = cps[ci]
        L = min(chunk, target - orbit.t + 1)
        st = orbit.block(L)
        for mon in monitors:
            mon.consume(st)
        if orbit.t - 1 == target:
            for mon in monitors:
                mon.record(target)
            ci += 1
    return [mon.result() for mon in monitors]


# ---------------------------------------------------------------- induced LSV


class InducedSystem:
    """Partition data for the first-return map of LSV to Y = [1/2, 1).

    ``x_table[n]`` is x_n (x_0 = 1/2, f(x_{n+1}) = x_n), extended lazily.
    """

    MAX_DEPTH = 10**8

    def __init__(self, alpha: float, depth: int = 1024):
        if alpha < 1:
            raise ValueError("the induced system is used in the regime alpha >= 1")
        self.alpha = float(alpha)
        self.c = 2.0**self.alpha
        self._lock = threading.Lock()
        self._x = np.array([0.5])
        self.extend(depth)

    @property
    def depth(self) -> int:
        return self._x.shape[0] - 1

    @property
    def x_table(self) -> np.ndarray:
        return self._x

    def extend(self, n: int) -> "InducedSystem":
        if n > self.MAX_DEPTH:
            raise RuntimeError(f"induced table depth {n} exceeds the limit {self.MAX_DEPTH}")
        with self._lock:
            old = self._x
            if n <= old.shape[0] - 1:
                return self
            new = np.empty(n + 1)
            new[: old.shape[0]] = old
            K.fill_x_table(new, old.shape[0], self.alpha, self.c)
            self._x = new
        return self

    def x(self, n: int) -> float:
        """x_n, with x_{-1} = 1."""
        if n == -1:
            return 1.0
        if n > self.depth:
            self.extend(max(n, 2 * self.depth))
        return float(self._x[n])

    def z(self, n: int) -> float:
        """z_n = (1 + x_{n-1}) / 2, so that f(z_n) = x_{n-1}; z_0 = 1."""
        return 0.5 * (1.0 + self.x(n - 1))

    def lengths(self, n_max: int) -> np.ndarray:
        """|Y_n| for n = 1..n_max.

        |Y_n| = (x_{n-2} - x_{n-1}) / 2 = c x_{n-1}^(alpha+1) / 2, the
        second form avoiding cancellation.
        """
        self.x(n_max)
        xs = self._x[: n_max]
        return 0.5 * self.c * xs ** (self.alpha + 1.0)

    def return_time_of_entry(self, w: float) -> int:
        """n with w in [x_n, x_{n-1}): the laminar escape time from w."""
        if not 0.0 <= w < 0.5:
            raise ValueError("w must lie in [0, 1/2)")
        if w == 0.0:
            raise ValueError("w = 0 is the neutral fixed point; it never escapes")
        while True:
            n = K.entry_index(self._x, w)
            if n >= 0:
                return int(n)
            if self.depth >= self.MAX_DEPTH:
                raise RuntimeError(f"w = {w!r} escapes after more than {self.MAX_DEPTH} steps")
            self.extend(min(2 * self.depth, self.MAX_DEPTH))

    def return_time(self, y: float) -> int:
        """R(y) for y in Y."""
        w = 2.0 * y - 1.0
        return 1 if w >= 0.5 else 1 + self.return_time_of_entry(w)

    def return_times_capped(self, ys: np.ndarray, cap: int) -> np.ndarray:
        """R(y) for an array of y in Y, with every R > cap reported as cap + 1."""
        self.x(cap)
        w = 2.0 * np.asarray(ys, dtype=float) - 1.0
        if np.any((w < 0.0) | (w >= 1.0)):
            raise ValueError("points must lie in Y = [1/2, 1)")
        # x_table is decreasing; n with x_n <= w < x_{n-1}
        xs = self._x[: cap + 1]
        n = np.searchsorted(-xs, -w, side="left")
        r = np.where(w >= 0.5, 1, 1 + n)
        return np.minimum(r, cap + 1)

    def sample_returns(self, y0: float, n_events: int, fast_forward: bool = False,
                       seed: int = 0, depth_exact: int = 1000):
        """Induced orbit ``(y_1..y_n, R_0..R_{n-1})`` from y0 in Y.

        With ``fast_forward`` off every excursion is iterated clock by clock
        (cost equals clock time).  With it on, deep laminar excursions are
        transported along the x-table / Fatou coordinate and only their last
        ``depth_exact`` steps are iterated; each step also refreshes the low
        digit of 2y - 1 from the seed.  Returns (y, R, n_saturated).
        """
        ys = np.empty(n_events)
        rs = np.empty(n_events, dtype=np.int64)
        if not fast_forward:
            K.induced_exact(y0, n_events, self.alpha, self.c, ys, rs)
            return ys, rs, 0
        if self.depth < 4 * depth_exact:
            self.extend(4 * depth_exact)
        rng = np.array([seed & MASK64], dtype=np.uint64)
        sat = K.induced_fast(y0, n_events, self.alpha, self.c, self._x, depth_exact, rng, ys, rs)
        return ys, rs, int(sat)


def extend_induced(sys: InducedSystem, n: int) -> InducedSystem:
    if n < sys.depth:
        raise ValueError("requested depth is below the current table depth")
    return sys.extend(n)


def return_time_of_entry(sys: InducedSystem, w: float) -> int:
    return sys.return_time_of_entry(w)


def return_time_event_stream(m: LSV, y0: float) -> Iterator[tuple[float, int]]:
    """Yield ``(y_{j+1}, R_j)`` by clock-by-clock iteration from y0 in Y."""
    if not isinstance(m, LSV) or m.alpha < 1:
        raise ValueError("event stream is defined for LSV with alpha >= 1")
    if not 0.5 <= y0 < 1.0:
        raise ValueError("y0 must lie in [1/2, 1)")
    a, c = m.alpha, m.c
    y = y0
    while True:
        x = K.lsv_f(y, a, c)
        r = 1
        while x < 0.5:
            x = K.lsv_f(x, a, c)
            r += 1
        yield float(x), r
        y = x
