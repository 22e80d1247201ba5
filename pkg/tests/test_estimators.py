import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from infscale.estimators import (
    EstimatorError,
    TabulatedFunction,
    ensemble_aggregate,
    hitting_exponent,
    hitting_indicators,
    indicators_from_min_distance,
    invert_monotone_bound,
    local_slopes,
    loglog_slope,
    median_hitting_exponent,
    tail_liminf_limsup,
)
from infscale.traces import HittingRecord, ProcessTrace

N = np.unique(np.geomspace(1, 1e7, 90).astype(np.int64))


def test_slope_of_power_law():
    f = loglog_slope((N, N.astype(float) ** 2))
    assert f.slope == pytest.approx(2.0, abs=1e-12)
    assert loglog_slope((N, np.full(N.shape, 3.0))).slope == pytest.approx(0.0, abs=1e-12)


def test_slope_of_log_polluted_power_law():
    """n^0.5 (log n)^2 on [1e4, 1e7]: OLS sees 0.5 + 2 / mean(log n)."""
    n = np.unique(np.geomspace(1e4, 1e7, 60).astype(np.int64))
    v = np.sqrt(n) * np.log(n) ** 2
    got = loglog_slope((n, v), window=(1e4, 1e7)).slope
    # independent oracle: d log v / d log n = 0.5 + 2 / log n, averaged by OLS
    x = np.log(n)
    oracle = np.polyfit(x, 0.5 * x + 2 * np.log(x), 1)[0]
    assert got == pytest.approx(oracle, abs=1e-12)
    assert got == pytest.approx(0.660, abs=0.005)


def test_slope_needs_points():
    with pytest.raises(EstimatorError):
        loglog_slope((N[:5], N[:5].astype(float)))


def test_slope_rejects_nonpositive():
    with pytest.raises((EstimatorError, ValueError)):
        loglog_slope((N, np.zeros(N.shape)))


def test_local_slopes_of_power_law():
    assert np.allclose(local_slopes((N, N.astype(float) ** 1.5)), 1.5)


def test_tail_constant_and_alternating():
    t = tail_liminf_limsup(N, np.full(N.shape, 0.7))
    assert t.lo == t.hi == 0.7 and not t.oscillates()
    n = 2 ** np.arange(1, 41)
    r = np.where(np.arange(40) % 2 == 0, 1.2, 2.1)
    t = tail_liminf_limsup(n, r)
    assert (t.lo, t.hi) == (1.2, 2.1) and t.oscillates()
    assert t.window[1] == n[-1]


def test_table_inverse_example():
    n = np.arange(1, 1001, dtype=float)
    tab = TabulatedFunction(n, n**2)
    g = invert_monotone_bound(tab, shift=-1.0)
    assert g(100.0) == pytest.approx(math.sqrt(99), abs=1e-3)


def test_identity_table_inverse():
    g = np.linspace(0.1, 10, 50)
    tab = TabulatedFunction(g, g)
    assert invert_monotone_bound(tab, 0.5)(3.0) == pytest.approx(3.5)


def test_non_monotone_table():
    with pytest.raises(ValueError, match="non-monotone"):
        TabulatedFunction([1, 2, 3], [1, 3, 2])


@given(st.floats(0.2, 5.0), st.floats(1.0, 1e6))
def test_table_power_law_round_trip(p, x):
    g = np.geomspace(1, 1e6, 40)
    tab = TabulatedFunction(g, g**p)
    assert tab.inverse(tab(x)) == pytest.approx(x, rel=1e-9)


def test_tent_bound_inversion_matches_root_finder():
    """Inverting l(n) = log n +- c log log n agrees with brentq on the formula."""
    from scipy.optimize import brentq

    c = 2.0
    n = np.geomspace(20, 1e12, 400)
    up = TabulatedFunction(n, np.log(n) + c * np.log(np.log(n)), mode="linear")
    lo = TabulatedFunction(n, np.log(n) - c * np.log(np.log(n)), mode="linear")
    for u in (8.0, 12.0, 20.0):
        a = up.inverse(u)  # smaller time
        b = lo.inverse(u)
        assert a < b
        ra = brentq(lambda t: t + c * math.log(t) - u, 3.0, 40.0)
        rb = brentq(lambda t: t - c * math.log(t) - u, 3.0, 40.0)
        assert a == pytest.approx(math.exp(ra), rel=1e-3)
        assert b == pytest.approx(math.exp(rb), rel=1e-3)


# ---------------------------------------------------------------- hitting


def _record(radii, tau):
    return HittingRecord(np.asarray(radii), np.asarray(tau), horizon=10**12)


def test_indicators_pure_power():
    r = 2.0 ** -np.arange(1, 16)
    rec = _record(r, np.round(r**-2.0).astype(np.int64))
    assert hitting_indicators(rec) == pytest.approx((2.0, 2.0))
    assert hitting_exponent(rec).slope == pytest.approx(2.0)


def test_indicators_alternating():
    k = np.arange(1, 21)
    r = 2.0 ** -k
    tau = np.where(k % 2 == 0, r**-1.0, r**-3.0)
    H_bar, H_under = hitting_indicators(_record(r, np.round(tau).astype(np.int64)))
    assert H_bar == pytest.approx(3.0) and H_under == pytest.approx(1.0)


def test_indicators_too_censored():
    r = 2.0 ** -np.arange(1, 16)
    tau = np.full(15, -1)
    tau[:3] = [2, 4, 8]
    with pytest.raises(EstimatorError, match="too censored"):
        hitting_indicators(_record(r, tau))


def test_median_exponent_is_exact_under_censoring():
    r = 2.0 ** -np.arange(1, 13)
    rng = np.random.default_rng(0)
    recs = []
    for _ in range(201):
        tau = np.floor(r**-2.0 * rng.lognormal(0, 1)).astype(np.int64)
        tau[tau > 2**16] = -1  # censored at 2^16
        recs.append(_record(r, tau))
    fit = median_hitting_exponent(recs)
    assert fit.slope == pytest.approx(2.0, abs=0.1)
    assert fit.n_hi < 11  # the fully censored radii are dropped


def test_indicators_from_min_distance():
    n = np.geomspace(2, 1e6, 50)
    H_bar, H_under = indicators_from_min_distance(n, n ** -0.5)
    assert H_bar == pytest.approx(2.0) and H_under == pytest.approx(2.0)


# ---------------------------------------------------------------- aggregation


def test_aggregate_identical_values():
    rep = ensemble_aggregate([1.5] * 30)
    assert rep.median == 1.5 and rep.iqr == 0.0 and rep.pass_fraction == 1.0


def test_aggregate_outlier_and_fraction():
    vals = [1.0] * 99 + [1e9]
    passes = [True] * 93 + [False] * 7
    rep = ensemble_aggregate(vals, passes, median_range=(0.9, 1.1), min_fraction=0.9)
    assert rep.median == 1.0 and rep.pass_fraction == 0.93 and rep.passed
    rep = ensemble_aggregate(vals, passes, min_fraction=0.95)
    assert not rep.passed


def test_aggregate_needs_orbits():
    with pytest.raises(EstimatorError):
        ensemble_aggregate([1.0] * 5)


def test_report_json_round_trip():
    import json
    rep = ensemble_aggregate([1.0, math.inf] * 15, experiment="x", statistic="y")
    d = json.loads(json.dumps(rep.to_dict()))
    assert d["experiment"] == "x" and len(d["values"]) == 30


def test_trace_kind_and_monotonicity():
    with pytest.raises(ValueError):
        ProcessTrace("nonsense", [1], [1.0])
    assert not ProcessTrace("maxima", [1, 2, 3], [1.0, 0.5, 2.0]).is_monotone()
    assert ProcessTrace("min_distance", [1, 2], [0.4, 0.1]).is_monotone()
    with pytest.raises(KeyError):
        ProcessTrace("maxima", [1, 2], [1.0, 2.0]).at(3)
