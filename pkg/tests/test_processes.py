import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from helpers import Identity, feed
from infscale.diophantine import ContinuedFraction, convergents, rotation_distance
from infscale.dynamics import (
    LSV,
    CheckpointSchedule,
    CircleRotation,
    Doubling,
    Orbit,
    Point,
    SingularHit,
    Tent,
    iterate_with_checkpoints,
    random_point,
)
from infscale.observables import DistPower, Target
from infscale.processes import (
    BallSchedule,
    BCCounterMonitor,
    BirkhoffMaxMonitor,
    ErdosRenyiMonitor,
    HittingMonitor,
    MinDistanceMonitor,
    RunLengthMonitor,
    aaronson_diagnostic,
    erdos_renyi,
    longest_run,
    runlength_via_symbolic,
    symbolic_distance_to_one,
    symbolic_hit_time,
)
from infscale.traces import ProcessTrace

# ---------------------------------------------------------------- sums and maxima


def test_birkhoff_and_max_examples():
    S, M = feed(BirkhoffMaxMonitor(Identity()), [0.2, 5.0, 1.0, 9.0], [3])
    assert S.values[0] == pytest.approx(6.2) and M.values[0] == 5.0


def test_constant_observable():
    S, M = feed(BirkhoffMaxMonitor(Identity()), [0.7] * 101, [1, 10, 100])
    assert np.allclose(S.values, [0.7, 7.0, 70.0]) and np.all(M.values == 0.7)


def test_doubling_sum_example():
    obs = DistPower(0.5, 1.0)
    S, _ = feed(BirkhoffMaxMonitor(obs), [0.3, 0.6, 0.2, 0.4, 0.8], [4])
    assert S.values[0] == pytest.approx(1 / 0.2 + 1 / 0.1 + 1 / 0.3 + 1 / 0.1)


def test_doubling_sum_example_through_engine():
    (S, _), = iterate_with_checkpoints(Doubling(), Point(0.3), CheckpointSchedule.explicit([4]),
                                       [BirkhoffMaxMonitor(DistPower(0.5, 1.0))])
    assert S.values[0] == pytest.approx(28.0 + 1 / 3, rel=1e-9)


def test_singular_hit_is_raised():
    with pytest.raises(SingularHit) as e:
        feed(BirkhoffMaxMonitor(DistPower(0.5, 1.0)), [0.3, 0.5, 0.2], [2])
    assert e.value.t == 1


@given(st.lists(st.floats(0.0, 1e6), min_size=3, max_size=200), st.integers(1, 50))
def test_block_size_invariance(vals, block):
    n = len(vals) - 1
    cps = sorted({1, max(1, n // 2), n})
    a = feed(BirkhoffMaxMonitor(Identity()), vals, cps)
    b = feed(BirkhoffMaxMonitor(Identity()), vals, cps, block=block)
    assert np.allclose(a[0].values, b[0].values, rtol=1e-12) and np.array_equal(a[1].values, b[1].values)
    assert a[1].is_monotone() and a[0].is_monotone(nonneg_observable=True)


# ---------------------------------------------------------------- hitting


def test_hitting_examples():
    h = feed(HittingMonitor([0.05], target=Target(Point(0.6))), [0.3, 0.6, 0.2, 0.4], [3])
    assert h.tau[0] == 1
    h = feed(HittingMonitor([2.0], target=Target(Point(0.6))), [0.3, 0.6, 0.2, 0.4], [3])
    assert h.tau[0] == 0


def test_hitting_censored_and_start():
    h = feed(HittingMonitor([0.01, 0.5], target=Target(Point(0.3)), start=1), [0.3, 0.6, 0.9], [2])
    assert list(h.tau) == [-1, 1]
    assert h.horizon == 2


def test_tent_hitting_matches_brute_force():
    r = 2.0**-10
    m = Tent()
    p = random_point(m, np.random.default_rng(5))
    sched = CheckpointSchedule.explicit([10**6])
    h, = iterate_with_checkpoints(m, p, sched, [HittingMonitor([r], target=Target(Point(0.5)))],
                                  refresh_seed=9, chunk=4096)
    st_ = Orbit(m, p, refresh_seed=9).block(10**6 + 1)
    brute = np.flatnonzero(np.abs(st_.base - 0.5) < r)
    assert h.tau[0] == (brute[0] if brute.size else -1)


def test_threshold_hitting_duality_small():
    vals = [0.5, 3.0, 1.0, 7.0, 2.0, 9.0]
    us = [0.1, 1.0, 2.5, 3.0, 8.0, 100.0]
    cps = [1, 2, 3, 4, 5]
    h = feed(HittingMonitor(us, obs=Identity()), vals, cps)
    _, M = feed(BirkhoffMaxMonitor(Identity()), vals, cps)
    tau = np.where(h.tau < 0, 10**9, h.tau)
    for n, m in zip(cps, M.values):
        for u, t in zip(us, tau):
            assert (m <= u) == (t >= n)


def test_done_flag_stops_early():
    mon = HittingMonitor([0.4], target=Target(Point(0.5)))
    h, = iterate_with_checkpoints(LSV(2.0), Point(0.3), CheckpointSchedule(10**9), [mon])
    assert h.tau[0] >= 0 and mon.done


# ---------------------------------------------------------------- min distance


def test_min_distance_examples():
    tr = feed(MinDistanceMonitor(Target(Point(0.55))), [0.3, 0.6, 0.2, 0.9], [2, 3])
    assert tr.values[0] == pytest.approx(0.05) and tr.values[1] == pytest.approx(0.05)
    assert tr.is_monotone()


def test_rotation_min_distance_follows_convergents():
    cf = ContinuedFraction.golden()
    qs = [q for _, q in convergents(cf, 20) if 10 < q < 10**4]
    p = Point(0.0, (0,))
    sched = CheckpointSchedule.explicit(qs)
    tr, = iterate_with_checkpoints(CircleRotation(cf), p, sched,
                                   [MinDistanceMonitor(Target(p, "fiber0"))])
    assert np.all(tr.values == 0.0)  # d_n includes state 0, the target itself
    # closest return among times 1..q_k is ||q_k theta||
    st_ = Orbit(CircleRotation(cf), p).block(qs[-1] + 1)
    d = Target(p, "fiber0").distances(st_)
    for q in qs:
        assert d[1:q + 1].min() == pytest.approx(rotation_distance(cf, q), rel=1e-12)


# ---------------------------------------------------------------- runs


def test_run_length_examples():
    sym = np.array([1, 1, 0, 1, 1, 1])
    assert longest_run(sym, 1) == 3 and longest_run(sym, 0) == 1
    assert longest_run(np.zeros(17, np.int8), 0) == 17


def test_run_length_monitor_uses_symbols_of_states_before_n():
    base = [0.7, 0.8, 0.1, 0.6, 0.9, 0.55, 0.2]  # symbols 1 1 0 1 1 1 0
    tr = feed(RunLengthMonitor(1), base, [6])
    assert tr.values[0] == 3


def test_run_length_matches_brute_force_on_lsv():
    n = 10**6
    m = LSV(2.0)
    p = random_point(m, np.random.default_rng(8))
    sched = CheckpointSchedule(n)
    r1, r0 = iterate_with_checkpoints(m, p, sched, [RunLengthMonitor(1, keep_symbols=True),
                                                  RunLengthMonitor(0)], chunk=50000)
    sym = (Orbit(m, p).block(n).base >= 0.5).astype(np.int8)
    for cp, v1, v0 in zip(sched.array()[::7], r1.values[::7], r0.values[::7]):
        s = sym[:cp]
        best = {0: 0, 1: 0}
        cur, prev = 0, None
        for x in s:
            cur = cur + 1 if x == prev else 1
            prev = x
            best[x] = max(best[x], cur)
        assert (v1, v0) == (best[1], best[0])
    assert r1.is_monotone() and r0.is_monotone()


@given(st.lists(st.integers(0, 1), min_size=1, max_size=300))
def test_runlength_symbolic_link(sym):
    s = np.array(sym, dtype=np.int8)
    n = len(sym)
    # stored symbols s[k] = eps_{k+1}; the helpers index from eps_1
    assert runlength_via_symbolic(s, n) == longest_run(s, 1)


@given(st.lists(st.integers(0, 1), min_size=2, max_size=300), st.integers(1, 8))
def test_lemma_hitting_inequalities(sym, n):
    """min_{i<=tau} d~(f^i x, 1) <= 2^-n, and min_{i<=tau-1} >= 2^-n."""
    s = np.array(sym + [0], dtype=np.int8)  # a trailing 0 closes every run
    tau = symbolic_hit_time(s, n, start=0)
    if tau < 0:
        return
    d = [symbolic_distance_to_one(s, i) for i in range(tau + 1)]
    assert min(d) <= 2.0**-n
    if tau >= 1:
        assert min(d[:tau]) >= 2.0**-n


# ---------------------------------------------------------------- Borel-Cantelli


def test_bc_whole_space_and_empty():
    base = np.random.default_rng(0).random(101)
    whole = BallSchedule(0.5, 0.0, radius_fn=lambda k: np.full(k.shape, 1.0))
    empty = BallSchedule(0.5, 0.0, radius_fn=lambda k: np.full(k.shape, -1.0))
    assert feed(BCCounterMonitor(whole), base, [100]).values[0] == 100
    assert feed(BCCounterMonitor(empty), base, [100]).values[0] == 0


def test_bc_doubling_classical():
    n, zeta = 10**5, 0.6
    balls = BallSchedule(0.3, zeta)
    expect = float(np.sum(np.arange(1, n + 1) ** -zeta))
    ok = 0
    rng = np.random.default_rng(12)
    for i in range(200):
        p = random_point(Doubling(), rng)
        tr, = iterate_with_checkpoints(Doubling(), p, CheckpointSchedule.explicit([n]),
                                       [BCCounterMonitor(balls)], refresh_seed=i + 1)
        ok += 0.8 <= tr.values[0] / expect <= 1.2
    assert ok >= 180


def test_measure_sum():
    b = BallSchedule(0.5, 0.3)
    assert b.measure_sum(1000, 1.0) == pytest.approx(np.sum(np.arange(1, 1001) ** -0.3))
    assert b.measure_sum(100, 2.0) == pytest.approx(np.sum(np.arange(1, 11) ** -0.6))
    assert b.measure_sum(0.5, 1.0) == 0.0


# ---------------------------------------------------------------- Erdos-Renyi


def test_erdos_renyi_examples():
    sym = np.array([1, 1, 0, 1, 1, 1])
    assert erdos_renyi(sym, 2) == 2
    assert erdos_renyi(sym, 6) == sym.sum()
    with pytest.raises(ValueError):
        erdos_renyi(sym, 7)


def test_erdos_renyi_monitor_matches_direct():
    rng = np.random.default_rng(4)
    base = rng.random(5001) ** 3 * 0.99  # more zeros than ones
    sym = (base >= 0.5).astype(np.int64)
    cps = [10, 100, 1000, 5000]
    K = lambda n: max(1, int(0.8 * math.log2(n)))
    tr = feed(ErdosRenyiMonitor(K), base, cps, block=333)
    for n, v, k in zip(cps, tr.values, tr.meta["K"]):
        assert v == erdos_renyi(sym[:n], k)


@given(st.lists(st.integers(0, 1), min_size=8, max_size=200))
def test_erdos_renyi_full_window_when_run_is_long(sym):
    s = np.array(sym)
    xi = longest_run(s, 1)
    for K in range(1, len(sym) + 1):
        if xi >= K:
            assert erdos_renyi(s, K) == K


# ---------------------------------------------------------------- Aaronson


def test_aaronson_examples():
    n = np.array([10, 100, 1000])
    r = aaronson_diagnostic(ProcessTrace("birkhoff_sum", n, n.astype(float) ** 2), 0.5, 0.1)
    assert np.allclose(r.values, n ** -0.2)
    r = aaronson_diagnostic(ProcessTrace("birkhoff_sum", n, n.astype(float)), 1.1, 0.1)
    assert np.allclose(r.values, 1.0)
    with pytest.raises(ValueError):
        aaronson_diagnostic(ProcessTrace("birkhoff_sum", n, n.astype(float)), 0.1, 0.2)


def test_aaronson_lsv_return_time_sums():
    from infscale.dynamics import InducedSystem
    sys = InducedSystem(2.0).extend(1 << 16)
    cps = np.array([10**3, 10**6])
    ok = 0
    for i in range(40):
        _, r, _ = sys.sample_returns(0.5 + 0.5 * (i + 0.5) / 40, 10**6, fast_forward=True, seed=i)
        S = np.cumsum(r.astype(float))[cps - 1]
        a = aaronson_diagnostic(ProcessTrace("birkhoff_sum", cps, S), 0.5, 0.1)
        ok += a.values[1] < a.values[0]
    assert ok >= 36
