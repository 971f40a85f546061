"""Pure-Python/NumPy fallback for the compiled kernels.

Same interface and the same scan conventions as ``_speedups`` (see that
module's docstring); vectorized rather than loop-per-element.  Within this
backend results are deterministic; across backends the float details may
differ by ulps inside the guard band, which tier-2 re-checking absorbs.
"""

from __future__ import annotations

import numpy as np

BACKEND_NAME = "fallback"

_EPS = float(np.finfo(np.float64).eps)

_D4_LUT = np.array([(e + 1) * (e + 2) * (e + 3) // 6 for e in range(68)], dtype=np.int64)


# -- segmented sieve blocks ---------------------------------------------------


def _factored_blocks(lo: int, hi: int, primes):
    """Yield (indices, exponents, prime) for each sieving prime; afterwards
    `rem` holds the unfactored cofactor (1 or a single large prime)."""
    n = hi - lo
    rem = np.arange(lo, hi, dtype=np.int64)
    hits = []
    for p in primes:
        p = int(p)
        if p * p >= hi:
            break
        start = ((lo + p - 1) // p) * p
        idx = np.arange(start - lo, n, p, dtype=np.int64)
        if idx.size == 0:
            continue
        e = np.ones(idx.size, dtype=np.int64)
        q = p * p
        while q < hi:
            s2 = ((lo + q - 1) // q) * q
            idx2 = np.arange(s2 - lo, n, q, dtype=np.int64)
            if idx2.size:
                e[(idx2 - idx[0]) // p] += 1
            q *= p
        pw = p ** np.arange(0, int(e.max()) + 1, dtype=np.int64)
        rem[idx] //= pw[e]
        hits.append((idx, e, p))
    return rem, hits


def d_block(lo: int, hi: int, primes) -> np.ndarray:
    rem, hits = _factored_blocks(lo, hi, primes)
    out = np.ones(hi - lo, dtype=np.int64)
    for idx, e, _p in hits:
        out[idx] *= e + 1
    out[rem > 1] *= 2
    return out


def d4_block(lo: int, hi: int, primes) -> np.ndarray:
    rem, hits = _factored_blocks(lo, hi, primes)
    out = np.ones(hi - lo, dtype=np.int64)
    for idx, e, _p in hits:
        out[idx] *= _D4_LUT[e]
    out[rem > 1] *= 4
    return out


def spf_block(lo: int, hi: int, primes) -> np.ndarray:
    n = hi - lo
    out = np.zeros(n, dtype=np.int64)
    for p in primes:
        p = int(p)
        if p * p >= hi:
            break
        start = ((lo + p - 1) // p) * p
        idx = np.arange(start - lo, n, p, dtype=np.int64)
        sub = out[idx]
        out[idx] = np.where(sub == 0, p, sub)
    untouched = out == 0
    vals = np.arange(lo, hi, dtype=np.int64)
    out[untouched] = np.where(vals[untouched] > 1, vals[untouched], 1)
    return out


# -- exact hyperbola summation ------------------------------------------------


def summatory_d_floor(x: int) -> int:
    if x <= 0:
        return 0
    import math

    r = math.isqrt(x)
    a = np.arange(1, r + 1, dtype=np.int64)
    return int(2 * int(np.sum(np.int64(x) // a, dtype=np.int64)) - r * r)


# -- scan inner loops ---------------------------------------------------------


def _envelope_vec(x: np.ndarray, L: np.ndarray, coef, xpow, lpow) -> np.ndarray:
    E = np.zeros_like(x)
    for c, xp, lp in zip(coef, xpow, lpow):
        term = c * x**xp
        for _ in range(int(lp)):
            term = term * L
        E += term
    return E


def scan_envelope_block(sums_ext, lo, hi, at_max, left_min, x_factor, two_sided,
                        c3, c2, c1, c0, env_coef, env_xpow, env_lpow,
                        guard_abs, guard_rel):
    x = np.arange(lo, hi, dtype=np.int64)
    xd = x.astype(np.float64)
    L = np.log(xd)
    E = _envelope_vec(xd, L, env_coef, env_xpow, env_lpow)
    if two_sided:
        P = ((c3 * L + c2) * L + c1) * L + c0
        M = xd * P if x_factor else P
    else:
        M = np.zeros_like(xd)

    S_at = sums_ext[1:].astype(np.float64)
    S_left = sums_ext[:-1].astype(np.float64)

    best = -1.0
    best_at = 0
    best_side = 0
    flagged = []  # (x, side)
    checks = 0

    def consider(S, mask, side):
        nonlocal best, best_at, best_side, checks
        checks += int(mask.sum())
        diff = np.abs(S - M) if two_sided else S
        slack = guard_abs + guard_rel * (np.abs(S) + np.abs(M) + E)
        ratio = diff / E
        flag = mask & (diff > E - slack)
        for xf in x[flag]:
            flagged.append((int(xf), side))
        ok = mask & ~flag
        if ok.any():
            sub = np.where(ok, ratio, -np.inf)
            i = int(np.argmax(sub))  # first maximum = lowest x
            r = float(sub[i])
            if r > best:
                best, best_at, best_side = r, int(x[i]), side

    # left-limit first, then at, mirroring the compiled loop order
    if two_sided:
        consider(S_left, x >= left_min, 1)
    consider(S_at, x <= at_max, 0)

    flagged.sort()
    fx = np.array([f[0] for f in flagged], dtype=np.int64)
    fs = np.array([f[1] for f in flagged], dtype=np.int64)
    return best, best_at, best_side, fx, fs, checks


def scan_weighted_block(dvals, lo, hi, at_max, left_min, carry_sum, carry_err,
                        kind, do_checks, c3, c2, c1, c0,
                        env_coef, env_xpow, env_lpow, guard_abs, guard_rel):
    x = np.arange(lo, hi, dtype=np.int64)
    xd = x.astype(np.float64)
    L = np.log(xd)
    has_term = x <= at_max
    dv = np.zeros(hi - lo, dtype=np.float64)
    m = int(min(hi, at_max + 1) - lo)
    if m > 0:
        dv[:m] = dvals[:m]
    terms = np.where(has_term, (dv * L / xd) if kind == 2 else (dv / xd), 0.0)
    S_arr = carry_sum + np.cumsum(terms)
    # rounding budget: eps*(|S| + 2|term|) per performed add (np.cumsum is a
    # sequential accumulation, so the recursive-summation bound applies)
    err_arr = carry_err + _EPS * np.cumsum(
        np.where(has_term, np.abs(S_arr) + 2.0 * np.abs(terms), 0.0)
    )
    S_left = np.empty_like(S_arr)
    S_left[0] = carry_sum
    S_left[1:] = S_arr[:-1]
    err_left = np.empty_like(err_arr)
    err_left[0] = carry_err
    err_left[1:] = err_arr[:-1]

    best = -1.0
    best_at = 0
    best_side = 0
    flagged = []
    checks = 0

    if do_checks:
        E = _envelope_vec(xd, L, env_coef, env_xpow, env_lpow)
        M = ((c3 * L + c2) * L + c1) * L + c0

        def consider(S, err, mask, side):
            nonlocal best, best_at, best_side, checks
            checks += int(mask.sum())
            diff = np.abs(S - M)
            slack = guard_abs + guard_rel * (np.abs(S) + np.abs(M) + E) + err
            ratio = diff / E
            flag = mask & (diff > E - slack)
            for xf in x[flag]:
                flagged.append((int(xf), side))
            ok = mask & ~flag
            if ok.any():
                sub = np.where(ok, ratio, -np.inf)
                i = int(np.argmax(sub))
                r = float(sub[i])
                if r > best:
                    best, best_at, best_side = r, int(x[i]), side

        consider(S_left, err_left, x >= left_min, 1)
        consider(S_arr, err_arr, x <= at_max, 0)

    flagged.sort()
    fx = np.array([f[0] for f in flagged], dtype=np.int64)
    fs = np.array([f[1] for f in flagged], dtype=np.int64)
    return (float(S_arr[-1]) if has_term.any() else carry_sum,
            float(err_arr[-1]) if has_term.any() else carry_err,
            best, best_at, best_side, fx, fs, checks)
