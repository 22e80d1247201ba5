"""Monitors: per-orbit state machines fed by the orbit engine.

Every monitor sees each block of states once, in order, and records at a
checkpoint n after states 0..n have been delivered.  Index conventions:

* Birkhoff sum and maximum at n use states 0..n-1.
* Running minimal distance d_n uses states 0..n.
* Run lengths use symbols eps_1..eps_n, eps_k read off state k-1.
* The Borel-Cantelli counter uses states 1..n (B_k is defined for k >= 1).
* Hitting times scan states from ``start`` (0 by default) on.
"""

from __future__ import annotations

import math
from typing import Callable, Sequence

import numpy as np

from . import _kernels as K
from .dynamics import CheckpointSchedule, SingularHit, States
from .traces import HittingRecord, ProcessTrace


class Monitor:
    def start(self, sched: CheckpointSchedule):
        self.sched = sched
        self._n = []
        self._reset()

    def _reset(self):
        pass

    def consume(self, st: States):
        raise NotImplementedError

    def record(self, n: int):
        raise NotImplementedError

    def result(self):
        raise NotImplementedError


class ExclusiveMonitor(Monitor):
    """Monitor whose value at n uses states 0..n-1 only.

    The last state of each block is held back and processed with the next
    block, so at ``record(n)`` exactly states 0..n-1 have been handled.
    """

    def start(self, sched):
        self._pending = None
        super().start(sched)

    def consume(self, st: States):
        if self._pending is not None:
            self._process(self._pending)
        if len(st) > 1:
            self._process(st.slice(0, len(st) - 1))
        self._pending = st.slice(len(st) - 1, len(st)).copy()

    def _process(self, st: States):
        raise NotImplementedError


class IdentityMonitor(Monitor):
    """Records the base coordinate (or a fiber as float) of state n."""

    def __init__(self, coord: str = "base"):
        self.coord = coord

    def _reset(self):
        self._v = []

    def consume(self, st):
        if self.coord == "base":
            self._last = float(st.base[-1])
        else:
            i = int(self.coord[-1])
            self._last = (int(st.fib_hi[-1, i]) << 64) | int(st.fib_lo[-1, i])

    def record(self, n):
        self._n.append(n)
        self._v.append(self._last)

    def result(self):
        vals = np.array(self._v, dtype=float if self.coord == "base" else object)
        return ProcessTrace("identity", self._n, vals)


class BirkhoffMaxMonitor(ExclusiveMonitor):
    """S_n = sum_{k<n} phi(f^k x) and M_n = max_{k<n} phi(f^k x)."""

    def __init__(self, obs):
        self.obs = obs

    def _reset(self):
        self._s = 0.0
        self._m = -math.inf
        self._S, self._M = [], []

    def _process(self, st):
        v = self.obs.values(st)
        if not np.all(np.isfinite(v)):
            bad = int(np.argmax(~np.isfinite(v)))
            raise SingularHit(st.t0 + bad)
        self._s += float(v.sum())
        self._m = max(self._m, float(v.max()))

    def record(self, n):
        self._n.append(n)
        self._S.append(self._s)
        self._M.append(self._m)

    def result(self):
        return (ProcessTrace("birkhoff_sum", self._n, np.array(self._S)),
                ProcessTrace("maxima", self._n, np.array(self._M)))


def birkhoff_and_max_monitor(obs) -> BirkhoffMaxMonitor:
    return BirkhoffMaxMonitor(obs)


class HittingMonitor(Monitor):
    """First passage into a nested family of targets.

    ``mode="radius"``: tau_r = min{n >= start : d(f^n x, x~) < r} with
    distances from ``target`` (an object with ``distances``).
    ``mode="threshold"``: tau_u = min{n >= start : phi(f^n x) > u} with
    values from ``obs.values``.  Strict inequalities make the event
    {M_n <= u} identical to {tau_u >= n}.
    """

    def __init__(self, levels: Sequence[float], *, target=None, obs=None,
                 start: int = 0):
        if (target is None) == (obs is None):
            raise ValueError("give exactly one of target (radii) or obs (thresholds)")
        self.mode = "radius" if target is not None else "threshold"
        self.target, self.obs = target, obs
        self.levels = np.asarray(levels, dtype=float)
        self.start_index = start

    def _reset(self):
        self.tau = np.full(self.levels.shape, -1, dtype=np.int64)
        # score > key means hit; for radii score = -d, key = -r
        self._key = -self.levels if self.mode == "radius" else self.levels.copy()
        self._horizon = 0

    def consume(self, st):
        open_ = self.tau < 0
        self._horizon = st.t0 + len(st) - 1
        if not open_.any():
            return
        if st.t0 < self.start_index:
            skip = min(self.start_index - st.t0, len(st))
            st = st.slice(skip, len(st))
            if len(st) == 0:
                return
        if self.mode == "radius":
            score = -self.target.distances(st)
        else:
            score = self.obs.values(st)
        cm = np.maximum.accumulate(score)
        idx = np.searchsorted(cm, self._key[open_], side="right")
        hit = idx < len(st)
        ids = np.flatnonzero(open_)[hit]
        self.tau[ids] = st.t0 + idx[hit]

    @property
    def done(self) -> bool:
        return bool(np.all(self.tau >= 0))

    def record(self, n):
        self._n.append(n)

    def result(self) -> HittingRecord:
        return HittingRecord(self.levels, self.tau.copy(), self._horizon, self.mode)

    def tau_at(self, n: int) -> np.ndarray:
        """Hitting times censored at horizon n (-1 if not hit by time n)."""
        return np.where((self.tau >= 0) & (self.tau <= n), self.tau, -1)


def hitting_monitor(levels, **kw) -> HittingMonitor:
    return HittingMonitor(levels, **kw)


class MinDistanceMonitor(Monitor):
    """d_n = min_{0<=i<=n} d(f^i x, y)."""

    def __init__(self, target):
        self.target = target

    def _reset(self):
        self._d = math.inf
        self._v = []

    def consume(self, st):
        self._d = min(self._d, float(self.target.distances(st).min()))

    def record(self, n):
        self._n.append(n)
        self._v.append(self._d)

    def result(self):
        return ProcessTrace("min_distance", self._n, np.array(self._v))


def min_distance_monitor(target) -> MinDistanceMonitor:
    return MinDistanceMonitor(target)


def symbols_of(st: States) -> np.ndarray:
    """eps = 1 iff the base coordinate lies in [1/2, 1)."""
    return (st.base >= 0.5).astype(np.int8)


class RunLengthMonitor(ExclusiveMonitor):
    """xi^(j)_n: longest run of symbol j among eps_1..eps_n."""

    def __init__(self, j: int, keep_symbols: bool = False):
        if j not in (0, 1):
            raise ValueError("symbol must be 0 or 1")
        self.j = j
        self.keep_symbols = keep_symbols

    def _reset(self):
        self._cur = 0
        self._best = 0
        self._v = []
        self._sym = []

    def _process(self, st):
        sym = symbols_of(st)
        self._cur, self._best = K.run_lengths(sym, np.int8(self.j), self._cur, self._best)
        if self.keep_symbols:
            self._sym.append(sym)

    def record(self, n):
        self._n.append(n)
        self._v.append(self._best)

    def symbols(self) -> np.ndarray:
        return np.concatenate(self._sym) if self._sym else np.zeros(0, np.int8)

    def result(self):
        return ProcessTrace(f"run_length_{self.j}", self._n, np.array(self._v, dtype=np.int64))


def run_length_monitor(j: int, **kw) -> RunLengthMonitor:
    return RunLengthMonitor(j, **kw)


def longest_run(symbols: np.ndarray, j: int) -> int:
    cur, best = K.run_lengths(np.asarray(symbols, dtype=np.int8), np.int8(j), 0, 0)
    return int(best)


class BallSchedule:
    """B_k = closed ball around ``center`` of radius r_k = k^-zeta / (2 h).

    ``h`` is the density of the reference measure at the center, so that
    mu(B_k) ~ k^-zeta.  ``radius_fn`` overrides the radius law.
    """

    def __init__(self, center: float, zeta: float, density: float = 1.0,
                 radius_fn: Callable[[np.ndarray], np.ndarray] | None = None):
        self.center = float(center)
        self.zeta = float(zeta)
        self.density = float(density)
        self.radius_fn = radius_fn

    def radii(self, k: np.ndarray) -> np.ndarray:
        if self.radius_fn is not None:
            return self.radius_fn(k)
        return k.astype(float) ** (-self.zeta) / (2.0 * self.density)

    def measure_sum(self, n: float, exponent: float) -> float:
        """sum_{k=1}^{floor(n^(1/exponent))} mu(B_{k^exponent}) = sum k^(-zeta exponent)."""
        top = int(math.floor(n ** (1.0 / exponent) + 1e-9))
        if top < 1:
            return 0.0
        k = np.arange(1, top + 1, dtype=float)
        return float(np.sum(k ** (-self.zeta * exponent)))


class BCCounterMonitor(Monitor):
    """sum_{k=1}^{n} 1_{B_k}(f^k x) for a moving-target schedule."""

    def __init__(self, schedule):
        self.schedule = schedule

    def _reset(self):
        self._count = 0
        self._v = []

    def consume(self, st):
        if st.t0 == 0:
            st = st.slice(1, len(st))
            if len(st) == 0:
                return
        k = st.times()
        r = self.schedule.radii(k)
        self._count += int(np.count_nonzero(np.abs(st.base - self.schedule.center) <= r))

    def record(self, n):
        self._n.append(n)
        self._v.append(self._count)

    def result(self):
        return ProcessTrace("bc_counter", self._n, np.array(self._v, dtype=np.int64))


def bc_counter_monitor(schedule) -> BCCounterMonitor:
    return BCCounterMonitor(schedule)


class ErdosRenyiMonitor(ExclusiveMonitor):
    """Upsilon(1_Y, n, K(n)): largest count of ones in a window of K(n) symbols.

    K(n) is evaluated at every checkpoint up front; one running maximum is
    kept per distinct window length, so the pass stays single and O(n).
    """

    def __init__(self, K_fn: Callable[[int], int]):
        self.K_fn = K_fn

    def _reset(self):
        ks = [int(self.K_fn(n)) for n in self.sched]
        for n, k in zip(self.sched, ks):
            if k > n:
                raise ValueError(f"window K(n)={k} exceeds n={n}")
            if k < 1:
                raise ValueError("window length must be >= 1")
        self._ks = ks
        self._distinct = sorted(set(ks))
        self._kmax = max(self._distinct) if ks else 1
        self._best = {k: 0 for k in self._distinct}
        self._tail = np.zeros(0, dtype=np.int64)  # last kmax symbols seen
        self._seen = 0
        self._v = []
        self._K = []

    def _process(self, st):
        sym = symbols_of(st).astype(np.int64)
        ext = np.concatenate([self._tail, sym])
        cs = np.concatenate([[0], np.cumsum(ext)])
        off = self._tail.size  # windows must end inside the new block
        for k in self._distinct:
            ends = np.arange(max(k, off + 1), ext.size + 1)
            if ends.size:
                w = cs[ends] - cs[ends - k]
                self._best[k] = max(self._best[k], int(w.max()))
        self._tail = ext[-self._kmax:]
        self._seen += len(st)

    def record(self, n):
        k = self._ks[len(self._n)]
        self._n.append(n)
        self._K.append(k)
        self._v.append(self._best[k])

    def result(self):
        return ProcessTrace("erdos_renyi", self._n, np.array(self._v, dtype=np.int64),
                            meta={"K": list(self._K)})


def erdos_renyi(symbols: np.ndarray, K: int) -> int:
    """max over windows of length K of the number of ones (direct form)."""
    s = np.asarray(symbols, dtype=np.int64)
    if K > s.size:
        raise ValueError("K(n) > n")
    if K < 1:
        raise ValueError("K must be >= 1")
    cs = np.concatenate([[0], np.cumsum(s)])
    return int((cs[K:] - cs[:-K]).max())


def aaronson_diagnostic(S_trace: ProcessTrace, alpha_phi: float, epsilon: float) -> ProcessTrace:
    """a(S_n)/n with a(x) = x^(alpha_phi - epsilon)."""
    if not alpha_phi > epsilon > 0:
        raise ValueError("need alpha_phi > epsilon > 0")
    n = S_trace.checkpoints.astype(float)
    v = np.asarray(S_trace.values, dtype=float) ** (alpha_phi - epsilon) / n
    return ProcessTrace("ratio", S_trace.checkpoints, v, meta={"exponent": alpha_phi - epsilon})


# ---------------------------------------------------------------- symbolic links


def symbolic_hit_time(symbols: np.ndarray, n: int, start: int = 1) -> int:
    """tau_{2^-n}(x, 1) in the symbolic metric: first i >= start with
    eps_{i+1} = ... = eps_{i+n} = 1, i.e. d~(f^i x, 1) < 2^-n (open ball,
    as for every hitting time in this package).  -1 if none.
    """
    s = np.asarray(symbols, dtype=np.int64)
    if s.size < n:
        return -1
    cs = np.concatenate([[0], np.cumsum(s)])
    win = cs[n:] - cs[:-n]  # win[i] = ones among eps_{i+1}..eps_{i+n}
    hits = np.flatnonzero(win[start:] == n)
    return int(hits[0] + start) if hits.size else -1


def symbolic_distance_to_one(symbols: np.ndarray, i: int) -> float:
    """d~(f^i x, 1) = 2^-m, m the first index >= 1 with eps_{i+m} = 0.

    Runs reaching the end of the stored sequence are truncated there.
    """
    s = np.asarray(symbols)
    zeros = np.flatnonzero(s[i:] == 0)
    m = int(zeros[0]) + 1 if zeros.size else s.size - i + 1
    return 2.0**-m


def runlength_via_symbolic(symbols: np.ndarray, n: int) -> int:
    """xi^(1)_n recovered from symbolic distances to the all-ones point.

    2^-xi = min_{0<=i<=n-1} max(2 d~(f^i x, 1), 2^-(n-i)): the run starting
    at eps_{i+1} has length m_i with d~(f^i x, 1) = 2^-(m_i + 1), and only
    n - i symbols of it are visible by time n.
    """
    s = np.asarray(symbols[:n])
    vals = [max(2.0 * symbolic_distance_to_one(s, i), 2.0 ** -(n - i)) for i in range(n)]
    best = min(vals) if vals else 1.0
    return int(round(-math.log2(best)))
