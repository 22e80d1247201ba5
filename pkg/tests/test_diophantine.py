import math
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from infscale.diophantine import (
    FIXED_ONE,
    ContinuedFraction,
    angle_from_config,
    angle_to_config,
    construct_type,
    construct_Y_xi_pair,
    convergents,
    deep_convergent,
    determinant_ok,
    fixed_angle,
    rotation_distance,
    type_estimate,
)

GOLDEN = (math.sqrt(5) - 1) / 2


def test_golden_denominators_are_fibonacci():
    qs = [q for _, q in convergents(ContinuedFraction.golden(), 6)]
    assert qs == [1, 2, 3, 5, 8, 13]


def test_sqrt2_minus_one():
    cf = ContinuedFraction((), (2,))
    assert [q for _, q in convergents(cf, 4)] == [2, 5, 12, 29]
    assert cf.to_float() == pytest.approx(math.sqrt(2) - 1, abs=1e-15)


def test_convergents_approach_golden():
    cs = convergents(ContinuedFraction.golden(), 30)
    for (p, q), (_, q_next) in zip(cs, cs[1:]):
        assert abs(p / q - GOLDEN) <= 1.0 / (q * q_next)


@given(st.lists(st.integers(1, 10**6), min_size=1, max_size=40), st.integers(0, 5))
def test_determinant_identity(quotients, a0):
    cf = ContinuedFraction(tuple(quotients), a0=a0)
    assert determinant_ok(cf, len(quotients))


def test_quotients_must_be_positive():
    with pytest.raises(ValueError):
        ContinuedFraction((1, 0, 2))


def test_finite_expansion_has_finite_convergents():
    with pytest.raises(IndexError):
        convergents(ContinuedFraction((1, 2)), 3)
    with pytest.raises(ValueError):
        deep_convergent(ContinuedFraction((1, 2)), 10**6)


def test_type_estimate_golden():
    assert type_estimate(ContinuedFraction.golden(), 30).gamma == pytest.approx(1.0, abs=0.01)


def test_type_estimate_needs_depth():
    with pytest.raises(ValueError):
        type_estimate(ContinuedFraction.golden(), 5)


@given(st.lists(st.integers(1, 50), min_size=12, max_size=30))
def test_type_is_at_least_one(quotients):
    assert type_estimate(ContinuedFraction(tuple(quotients)), 10).gamma >= 1 - 0.01


def test_construct_type_four():
    cf = construct_type(4.0, 12)
    g = type_estimate(cf, 11)
    assert 3.8 <= g.gamma <= 4.2
    # the convergent-ratio form log q_{n+1} / log q_n also tends to gamma
    qs = [q for _, q in convergents(cf, 12)]
    assert math.log(qs[-1]) / math.log(qs[-2]) == pytest.approx(4.0, rel=0.01)


def test_construct_type_one_is_golden():
    assert construct_type(1.0, 15).prefix == (1,) * 15


def test_construct_type_two_squares():
    qs = [q for _, q in convergents(construct_type(2.0, 14), 14)]
    for q, q_next in zip(qs[8:], qs[9:]):
        assert math.log(q_next) / math.log(q) == pytest.approx(2.0, rel=0.01)


def test_construct_type_rejects_gamma_below_one():
    with pytest.raises(ValueError):
        construct_type(0.5, 5)


def test_y_xi_pair_depth_eight():
    pair = construct_Y_xi_pair(4.0, 8)
    assert pair.verify()
    assert len(pair.certificate) == 8
    for _, q, qp, q_next in pair.certificate[1:]:
        # each angle's denominators grow with exponent xi^2 >= xi: finite type >= xi
        r = math.log(q_next) / math.log(q)
        assert 4.0 <= r < 1e3


def test_y_xi_pair_small():
    pair = construct_Y_xi_pair(2.5, 5)
    assert pair.verify()
    for _, q, qp, q_next in pair.certificate:
        # q'^2 >= q^5 and q_next^2 >= q'^5: exact integer form of the xi = 5/2 bounds
        assert qp**2 >= q**5 and q_next**2 >= qp**5
    with pytest.raises(ValueError):
        construct_Y_xi_pair(1.0, 3)


def test_y_xi_certificate_detects_tampering():
    pair = construct_Y_xi_pair(3.0, 4)
    rows = list(pair.certificate)
    n, q, qp, qn = rows[-1]
    rows[-1] = (n, q, qp, qp)  # q_{n+1} < q'_n^xi
    bad = type(pair)(pair.theta, pair.theta_prime, pair.xi, tuple(rows))
    assert not bad.verify()


def test_rotation_distance_golden():
    cf = ContinuedFraction.golden()
    cs = convergents(cf, 25)
    for (_, q), (_, q_next) in zip(cs[2:], cs[3:]):
        d = rotation_distance(cf, q)
        assert 1 / (2 * q_next) < d < 1 / q_next


def test_best_approximation_brute_force():
    cf = ContinuedFraction.golden()
    th = Fraction(*deep_convergent(cf, 1 << 80))

    def dist(q):
        x = q * th
        return min(x - math.floor(x), math.ceil(x) - x)

    qs = [q for _, q in convergents(cf, 20) if q <= 10**4]
    for qn in qs[1:]:
        best = min(range(1, qn + 1), key=dist)
        assert best == qn


def test_rotation_distance_rejects_zero():
    with pytest.raises(ValueError):
        rotation_distance(ContinuedFraction.golden(), 0)


def test_fixed_angle_accuracy():
    assert abs(Fraction(fixed_angle(ContinuedFraction.golden()), FIXED_ONE) - Fraction(GOLDEN)) < 1e-15


def test_angle_config_round_trip():
    cf = ContinuedFraction((3, 1, 4), (1, 5), a0=2)
    assert angle_from_config(angle_to_config(cf)) == cf
    assert angle_from_config([1, 2, 3]) == ContinuedFraction((1, 2, 3))
