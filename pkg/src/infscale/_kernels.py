"""Compiled inner loops.

Everything here is plain numba ``njit(nogil=True)`` code so that orbits of
an ensemble can run in threads.  Unsigned arithmetic is kept in uint64
throughout; mixing it with Python ints silently promotes to float64 in
numba, hence the explicit ``U64`` constants.
"""

import numpy as np
from numba import njit

U64 = np.uint64
ZERO = U64(0)
ONE = U64(1)
TOP = U64(1) << U64(63)
ALL = U64(0xFFFFFFFFFFFFFFFF)
SM_GAMMA = U64(0x9E3779B97F4A7C15)
SM_M1 = U64(0xBF58476D1CE4E5B9)
SM_M2 = U64(0x94D049BB133111EB)
INV53 = 1.0 / 9007199254740992.0
INV64 = 1.0 / 18446744073709551616.0

# map codes shared with dynamics.py
LSV, DOUBLING, TENT, ROTATION, SKEW1, SKEW2 = 0, 1, 2, 3, 4, 5


@njit(nogil=True, cache=True)
def splitmix_next(st):
    """Advance the splitmix64 state ``st[0]`` and return 64 random bits."""
    z = st[0] + SM_GAMMA
    st[0] = z
    z = (z ^ (z >> U64(30))) * SM_M1
    z = (z ^ (z >> U64(27))) * SM_M2
    return z ^ (z >> U64(31))


@njit(nogil=True, cache=True)
def uniform(st):
    return float(splitmix_next(st) >> U64(11)) * INV53


@njit(nogil=True, cache=True)
def lsv_f(x, alpha, c):
    if x >= 0.5:
        return 2.0 * x - 1.0
    if alpha == 1.0:
        return x * (1.0 + c * x)
    if alpha == 2.0:
        return x * (1.0 + c * x * x)
    if alpha == 0.0:
        return x * (1.0 + c)
    return x * (1.0 + c * x**alpha)


@njit(nogil=True, cache=True)
def advance(code, alpha, c, theta_hi, theta_lo, xf, s, fhi, flo, rng, bits,
            out_base, out_hi, out_lo):
    """Write ``len(out_base)`` consecutive states and step past them.

    ``xf`` (LSV float state), ``s`` (64-bit fixed-point base for the
    doubling-type maps), ``fhi``/``flo`` (fiber words) and ``bits``
    (``[buffer, remaining]`` random-bit reservoir) are one-element or
    short arrays updated in place.
    """
    n = out_base.shape[0]
    nf = fhi.shape[0]
    if code == LSV:
        x = xf[0]
        for i in range(n):
            out_base[i] = x
            x = lsv_f(x, alpha, c)
        xf[0] = x
        return
    if code == ROTATION:
        h = fhi[0]
        lo = flo[0]
        th = theta_hi[0]
        tl = theta_lo[0]
        for i in range(n):
            out_base[i] = 0.0
            out_hi[i, 0] = h
            out_lo[i, 0] = lo
            lo = lo + tl
            h = h + th + (ONE if lo < tl else ZERO)
        fhi[0] = h
        flo[0] = lo
        return
    # doubling-type base: shift in one fresh pseudo-random digit per step
    ss = s[0]
    buf = bits[0]
    left = bits[1]
    for i in range(n):
        out_base[i] = float(ss >> U64(11)) * INV53
        upper = (ss & TOP) != ZERO
        for j in range(nf):
            out_hi[i, j] = fhi[j]
            out_lo[i, j] = flo[j]
            if upper:
                lo = flo[j] + theta_lo[j]
                carry = ONE if lo < theta_lo[j] else ZERO
                fhi[j] = fhi[j] + theta_hi[j] + carry
                flo[j] = lo
        if left == ZERO:
            buf = splitmix_next(rng)
            left = U64(64)
        b = buf & ONE
        buf = buf >> ONE
        left = left - ONE
        ss = (ss << ONE) | b
        if code == TENT and upper:
            ss = ~ss
    s[0] = ss
    bits[0] = buf
    bits[1] = left


@njit(nogil=True, cache=True)
def circle_dist128(hi, lo, chi, clo):
    """Circle distance between 128-bit fixed-point angles, as float."""
    dlo = lo - clo
    borrow = ONE if lo < clo else ZERO
    dhi = hi - chi - borrow
    if (dhi & TOP) != ZERO:
        # negate (two's complement over 128 bits)
        dlo = ~dlo + ONE
        dhi = ~dhi + (ONE if dlo == ZERO else ZERO)
    return float(dhi) * INV64 + float(dlo) * INV64 * INV64


@njit(nogil=True, cache=True)
def fiber_distances(hi, lo, chi, clo, out):
    for i in range(hi.shape[0]):
        out[i] = circle_dist128(hi[i], lo[i], chi, clo)


@njit(nogil=True, cache=True)
def run_lengths(sym, target, cur, best):
    """Update (current, best) run of ``target`` over the symbol array."""
    for i in range(sym.shape[0]):
        if sym[i] == target:
            cur += 1
            if cur > best:
                best = cur
        else:
            cur = 0
    return cur, best


# ---------------------------------------------------------------- induced LSV


@njit(nogil=True, cache=True)
def lsv_preimage_left(y, alpha, c):
    """The x in [0, 1/2) with x (1 + c x^alpha) = y, for y in (0, 1)."""
    lo = y / (1.0 + c * y**alpha)
    hi = y
    if lo > hi:
        lo, hi = hi, lo
    while hi - lo > 1e-14:
        mid = 0.5 * (lo + hi)
        if mid * (1.0 + c * mid**alpha) < y:
            lo = mid
        else:
            hi = mid
    x = 0.5 * (lo + hi)
    for _ in range(2):
        g = x * (1.0 + c * x**alpha) - y
        dg = 1.0 + c * (alpha + 1.0) * x**alpha
        x = x - g / dg
    return x


@njit(nogil=True, cache=True)
def fill_x_table(table, start, alpha, c):
    for n in range(start, table.shape[0]):
        table[n] = lsv_preimage_left(table[n - 1], alpha, c)


@njit(nogil=True, cache=True)
def entry_index(table, w):
    """n with table[n] <= w < table[n-1]; table decreasing, table[0] = 1/2.

    Returns -1 if w is below the deepest entry.
    """
    if w >= table[0]:
        return 0
    last = table.shape[0] - 1
    if w < table[last]:
        return -1
    lo, hi = 0, last  # table[lo] > w >= table[hi]
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if table[mid] > w:
            lo = mid
        else:
            hi = mid
    return hi


@njit(nogil=True, cache=True)
def fatou(x, alpha, c):
    # approximate Fatou coordinate: N(f(x)) = N(x) - 1 + O(x^{2 alpha})
    return x ** (-alpha) / (alpha * c) - 0.5 * (alpha + 1.0) * np.log(x)


@njit(nogil=True, cache=True)
def induced_exact(y0, n_events, alpha, c, out_y, out_r):
    """Clock-by-clock first-return events of the LSV map on Y = [1/2, 1)."""
    y = y0
    for j in range(n_events):
        x = lsv_f(y, alpha, c)
        r = 1
        while x < 0.5:
            x = lsv_f(x, alpha, c)
            r += 1
        out_r[j] = r
        out_y[j] = x
        y = x


R_CAP = np.int64(1) << np.int64(62)


@njit(nogil=True, cache=True)
def induced_fast(y0, n_events, alpha, c, table, depth_exact, rng, out_y, out_r):
    """First-return events with the laminar phase fast-forwarded.

    Excursions entering at depth m <= depth_exact are iterated step by
    step.  Deeper ones are transported, keeping their fractional position
    inside the entry cell, to depth ``depth_exact`` and the last part is
    iterated exactly.  Depth beyond the table uses the Fatou coordinate
    anchored at the deepest entry.  Returns the number of saturated R.
    """
    last = table.shape[0] - 1
    n_anchor = fatou(table[last], alpha, c)
    sat = 0
    y = y0
    L = depth_exact
    for j in range(n_events):
        w = 2.0 * y - 1.0 + uniform(rng) * INV53
        if w <= 0.0:
            w = INV53 * INV53
        if w >= 0.5:
            out_r[j] = 1
            out_y[j] = w
            y = w
            continue
        m = entry_index(table, w)
        phase = 0.0
        if m < 0:
            idx = last + (fatou(w, alpha, c) - n_anchor)
            mf = np.ceil(idx)
            if mf >= 4.0e18:
                m = R_CAP
            else:
                m = np.int64(mf)
            phase = idx - (mf - 1.0)
        elif m > L:
            phase = (table[m - 1] - w) / (table[m - 1] - table[m])
        if m <= L:
            x = w
            r = 1
            while x < 0.5:
                x = lsv_f(x, alpha, c)
                r += 1
            out_r[j] = r
            out_y[j] = x
            y = x
            continue
        x = table[L - 1] - phase * (table[L - 1] - table[L])
        steps = 0
        while x < 0.5:
            x = lsv_f(x, alpha, c)
            steps += 1
        r = 1 + (m - L) + steps
        if m >= R_CAP or r >= R_CAP:
            r = R_CAP
            sat += 1
        out_r[j] = r
        out_y[j] = x
        y = x
    return sat


# ---------------------------------------------------------------- tower


@njit(nogil=True, cache=True)
def tower_base_step(x, cum, rng):
    """Affine full-branch base map; returns (image, branch index >= 1)."""
    k = np.searchsorted(cum, x, side="right")  # cum[k-1] <= x < cum[k]
    a = cum[k - 1]
    b = cum[k]
    y = (x - a) / (b - a) + uniform(rng) * INV53
    if y >= 1.0:
        y = y - 1.0
    return y, k


@njit(nogil=True, cache=True)
def tower_bc_clock(x0, n_max, cum, rng, center, zeta, checkpoints, out):
    """Clock-by-clock tower orbit counting hits of B_k at level 0.

    B_k is the base interval of Lebesgue length k^-zeta around ``center``
    (closed), for clock time k >= 1.
    """
    x = x0
    k_br = np.searchsorted(cum, x, side="right")
    level = 0
    count = 0
    ci = 0
    for t in range(n_max + 1):
        if t >= 1 and level == 0:
            if abs(x - center) <= 0.5 * float(t) ** (-zeta):
                count += 1
        while ci < checkpoints.shape[0] and checkpoints[ci] == t:
            out[ci] = count
            ci += 1
        # step
        if level + 1 < k_br:
            level += 1
        else:
            x, _ = tower_base_step(x, cum, rng)
            k_br = np.searchsorted(cum, x, side="right")
            level = 0
    return count


@njit(nogil=True, cache=True)
def tower_bc_returns(x0, n_max, cum, rng, center, zeta, checkpoints, out):
    """Same count as ``tower_bc_clock`` via return-time bookkeeping."""
    x = x0
    t = 0
    count = 0
    ci = 0
    while True:
        if t >= 1 and t <= n_max:
            if abs(x - center) <= 0.5 * float(t) ** (-zeta):
                count += 1
        k_br = np.searchsorted(cum, x, side="right")
        t_next = t + k_br
        # checkpoints in [t, t_next) see the same count
        while ci < checkpoints.shape[0] and checkpoints[ci] < t_next:
            out[ci] = count
            ci += 1
        if ci >= checkpoints.shape[0] or t_next > n_max:
            while ci < checkpoints.shape[0]:
                out[ci] = count
                ci += 1
            return count
        x, _ = tower_base_step(x, cum, rng)
        t = t_next
