"""Continued fractions, Diophantine type and exact rotation distances.

All convergent arithmetic is done with Python integers, so nothing here
overflows or rounds until a value is explicitly converted to float.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator

import mpmath
from gmpy2 import mpz

FIXED_BITS = 128
FIXED_ONE = 1 << FIXED_BITS


@dataclass(frozen=True)
class ContinuedFraction:
    """The number ``[a0; a1, a2, ...]``.

    ``prefix`` holds ``a1, a2, ...`` explicitly.  When ``period`` is given
    the quotients continue by repeating it forever, which covers quadratic
    irrationals such as the golden mean; otherwise the expansion stops
    after ``prefix`` and only that many convergents exist.
    """

    prefix: tuple[int, ...]
    period: tuple[int, ...] = ()
    a0: int = 0

    def __post_init__(self):
        if any(int(a) < 1 for a in self.prefix + self.period):
            raise ValueError("partial quotients must be positive integers")
        object.__setattr__(self, "prefix", tuple(int(a) for a in self.prefix))
        object.__setattr__(self, "period", tuple(int(a) for a in self.period))

    @classmethod
    def golden(cls) -> "ContinuedFraction":
        return cls((), (1,), a0=0)

    @property
    def depth(self) -> float:
        return math.inf if self.period else len(self.prefix)

    def quotient(self, n: int) -> int:
        """Partial quotient ``a_n`` (1-based)."""
        if n < 1:
            raise ValueError("quotients are indexed from 1")
        if n <= len(self.prefix):
            return self.prefix[n - 1]
        if not self.period:
            raise IndexError(f"expansion has only {len(self.prefix)} quotients")
        return self.period[(n - len(self.prefix) - 1) % len(self.period)]

    def iter_convergents(self) -> Iterator[tuple[int, int]]:
        p_prev, p = 1, self.a0
        q_prev, q = 0, 1
        n = 1
        while n <= self.depth:
            a = self.quotient(n)
            p_prev, p = p, a * p + p_prev
            q_prev, q = q, a * q + q_prev
            yield p, q
            n += 1

    def to_float(self) -> float:
        p, q = deep_convergent(self, 1 << 80)
        return float(Fraction(p, q))


def convergents(cf: ContinuedFraction, n: int) -> list[tuple[int, int]]:
    """First ``n`` convergents ``(p_k, q_k)``, k = 1..n."""
    if n < 1:
        raise ValueError("n must be >= 1")
    out = []
    for pq in cf.iter_convergents():
        out.append(pq)
        if len(out) == n:
            break
    if len(out) < n:
        raise IndexError(f"expansion has only {len(out)} convergents")
    return out


def deep_convergent(cf: ContinuedFraction, min_q: int) -> tuple[int, int]:
    """First convergent whose denominator exceeds ``min_q``."""
    last = None
    for p, q in cf.iter_convergents():
        last = (p, q)
        if q > min_q:
            return last
    raise ValueError(
        f"continued fraction too shallow: largest denominator {last and last[1]} "
        f"does not exceed {min_q}"
    )


def determinant_ok(cf: ContinuedFraction, n: int) -> bool:
    """Check ``p_k q_{k-1} - p_{k-1} q_k = (-1)^(k-1)`` for k = 1..n."""
    p_prev, q_prev = cf.a0, 1
    for k, (p, q) in enumerate(convergents(cf, n), start=1):
        if p * q_prev - p_prev * q != (-1) ** (k - 1):
            return False
        p_prev, q_prev = p, q
    return True


@dataclass(frozen=True)
class TypeEstimate:
    gamma: float
    index: int


def type_estimate(cf: ContinuedFraction, depth: int) -> TypeEstimate:
    """Estimate the Diophantine type from the first ``depth`` quotients.

    Uses ``1 + max_n log a_{n+1} / log q_n`` over n <= depth with q_n >= 2.
    This is the convergent-ratio characterisation with the
    ``log(q_{n+1}/q_n) - log a_{n+1} = O(1)`` term removed, which otherwise
    biases bounded-quotient numbers upwards by ``~1/n``.
    """
    if depth < 10:
        raise ValueError("depth must be >= 10")
    best, best_n = 1.0, 0
    for n, (_, q) in enumerate(convergents(cf, depth), start=1):
        if q < 2:
            continue
        try:
            a_next = cf.quotient(n + 1)
        except IndexError:
            break
        g = 1.0 + math.log(a_next) / math.log(q)
        if g > best:
            best, best_n = g, n
    return TypeEstimate(best, best_n)


def _int_power_floor(q: int, e: float) -> int:
    """floor(q**e) for a huge integer q."""
    if float(e).is_integer():
        return mpz(q) ** int(e)
    digits = int(e * len(str(q))) + 30
    with mpmath.workdps(digits):
        return int(mpmath.floor(mpmath.mpf(q) ** e))


def _int_power_ceil(q: int, e: float) -> int:
    if float(e).is_integer():
        return mpz(q) ** int(e)
    digits = int(e * len(str(q))) + 30
    with mpmath.workdps(digits):
        return int(mpmath.ceil(mpmath.mpf(q) ** e))


def construct_type(gamma: float, depth: int) -> ContinuedFraction:
    """Continued fraction with ``a_{n+1} = max(1, floor(q_n^(gamma-1)))``."""
    if gamma < 1:
        raise ValueError("gamma must be >= 1")
    quotients = []
    q_prev, q = 0, 1
    for _ in range(depth):
        a = max(1, _int_power_floor(q, gamma - 1.0))
        quotients.append(a)
        q_prev, q = q, a * q + q_prev
    return ContinuedFraction(tuple(quotients))


@dataclass(frozen=True)
class YXiPair:
    theta: ContinuedFraction
    theta_prime: ContinuedFraction
    xi: float
    # (n, q_n, q'_n, q_{n+1}) rows, each checked exactly
    certificate: tuple[tuple[int, int, int, int], ...] = field(repr=False)

    def verify(self) -> bool:
        for _, q, qp, q_next in self.certificate:
            if qp < _int_power_ceil(q, self.xi) or q_next < _int_power_ceil(qp, self.xi):
                return False
        return True


def _smallest_quotient(target: int, q: int, q_prev: int) -> int:
    # smallest a >= 1 with a*q + q_prev >= target
    need = target - q_prev
    return max(1, -(-need // q))


def construct_Y_xi_pair(xi: float, depth: int) -> YXiPair:
    """Greedy interleaved pair with ``q'_n >= q_n^xi`` and ``q_{n+1} >= q'_n^xi``."""
    if xi <= 1:
        raise ValueError("xi must be > 1")
    a, ap = [], []
    # GMP arithmetic: at depth 8 with xi = 4 the denominators have ~10^8 digits
    q_prev, q = mpz(0), mpz(1)
    qp_prev, qp = mpz(0), mpz(1)
    rows = []
    for n in range(1, depth + 1):
        if n == 1:
            a.append(1)
            q_prev, q = q, q + q_prev
        a_p = _smallest_quotient(_int_power_ceil(q, xi), qp, qp_prev)
        ap.append(a_p)
        qp_prev, qp = qp, a_p * qp + qp_prev
        a_n = _smallest_quotient(_int_power_ceil(qp, xi), q, q_prev)
        a.append(a_n)
        q_next = a_n * q + q_prev
        rows.append((n, q, qp, q_next))
        q_prev, q = q, q_next
    pair = YXiPair(
        ContinuedFraction(tuple(map(int, a))), ContinuedFraction(tuple(map(int, ap))), xi,
        tuple(tuple(int(v) for v in row) for row in rows),
    )
    return pair


def fixed_angle(cf: ContinuedFraction) -> int:
    """theta as a 128-bit fixed-point fraction, from a convergent with q > 2^96."""
    p, q = deep_convergent(cf, 1 << 96)
    return ((p - cf.a0 * q) << FIXED_BITS) // q % FIXED_ONE


def rotation_distance(cf: ContinuedFraction, q: int) -> float:
    """||q theta||, the distance from q*theta to the nearest integer.

    Computed exactly from a convergent deep enough that the rational
    approximation error is below 2^-140 after multiplying by ``q``.
    """
    if q < 1:
        raise ValueError("q must be >= 1")
    bound = max(q, 1) << 140
    try:
        p_n, q_n = deep_convergent(cf, bound)
    except ValueError:
        # finite expansion: the number is the last convergent itself
        p_n, q_n = convergents(cf, len(cf.prefix))[-1]
    r = Fraction(q * p_n, q_n)
    frac = r - math.floor(r)
    return float(min(frac, 1 - frac))


def fixed_to_float(v: int) -> float:
    return float(Fraction(v, FIXED_ONE))


def float_to_fixed(x: float) -> int:
    return int(Fraction(x) * FIXED_ONE) % FIXED_ONE


def angle_to_config(cf: ContinuedFraction) -> dict:
    return {"a0": cf.a0, "prefix": list(cf.prefix), "period": list(cf.period)}


def angle_from_config(d) -> ContinuedFraction:
    if isinstance(d, (list, tuple)):
        return ContinuedFraction(tuple(d))
    return ContinuedFraction(
        tuple(d.get("prefix", ())), tuple(d.get("period", ())), int(d.get("a0", 0))
    )
