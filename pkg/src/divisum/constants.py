"""Certified constants for the divisor-sum main terms.

Everything here is computed, not transcribed: Stieltjes constants and zeta
derivatives come from Euler-Maclaurin summation with a fully rigorous
remainder enclosure, and the derived coefficient blocks (C1..C4, D1..D4,
envelope constants) are assembled in enclosure arithmetic from those.

Euler-Maclaurin scheme, for f(t) = (log t)^k / t^s with k >= 0 and s in
{1, 3/2, 2, 3}:

    sum_{n<=N} f(n)  [- (log N)^{k+1}/(k+1)   when s = 1 (Stieltjes limit)]
                     [+ int_N^inf f           when s > 1 (series tail)    ]
      - f(N)/2 - sum_{j=1}^{m} B_{2j}/(2j)! * f^{(2j-1)}(N)  +  R_m

with |R_m| <= |B_{2m}|/(2m)! * int_N^inf |f^{(2m)}(t)| dt.  Derivatives are
exact rational-coefficient polynomials in log t over a power of t, via the
recurrence P_{j+1} = P_j' - (s+j) P_j, so both the correction terms and the
remainder integral are evaluated in closed form:

    int_N^inf (log t)^j t^{-sigma} dt
        = N^{1-sigma} * sum_{r=0}^{j} (j!/(j-r)!) (log N)^{j-r} / (sigma-1)^{r+1}.

The remainder uses the coefficient-wise triangle inequality
|f^{(2m)}| <= sum_i |c_i| (log t)^i / t^{s+2m} (valid since log t >= 0 for
t >= 1), so no sign or monotonicity assumption about f^{(2m)} is needed;
the max of the periodized Bernoulli polynomial |B_{2m}({t})| <= |B_{2m}| is
classical.  Cutoff N and order m are chosen adaptively against the radius
target; the bound is *checked*, never assumed.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator

from mpmath import bernfrac, iv

from divisum.enclosure import DEFAULT_PRECISION, Enclosure, working_precision
from divisum.errors import PrecisionError

__all__ = [
    "ConstantsTable",
    "build_constants_table",
    "stieltjes",
    "zeta_derivative_at_2",
    "zeta_value",
    "radius_target",
]

# (cutoff N, max corrections m) escalation schedule
_SCHEDULE = ((10_000, 24), (40_000, 28), (160_000, 32))


def radius_target(precision: int) -> Fraction:
    """Radius goal as a function of working precision: 2^-84 (~5e-26, under
    the 1e-25 contract) at 256 bits, scaling linearly in the bit count so
    doubled precision gives properly nested, far tighter enclosures."""
    return Fraction(1, 2 ** ((84 * precision) // 256))


# -- derivative polynomials and tail integrals --------------------------------


def _derivative_polys(k: int, s: Fraction, count: int) -> list[list[Fraction]]:
    """Coefficient lists (index = power of log t) of P_0..P_count where
    f^(j)(t) = P_j(log t) / t^(s+j) for f(t) = (log t)^k / t^s."""
    polys = [[Fraction(0)] * k + [Fraction(1)]]
    for j in range(count):
        p = polys[-1]
        # P' (in the log-variable) shifted down one degree
        dp = [i * p[i] for i in range(1, len(p))] or [Fraction(0)]
        factor = s + j
        nxt = [Fraction(0)] * len(p)
        for i, c in enumerate(dp):
            nxt[i] += c
        for i, c in enumerate(p):
            nxt[i] -= factor * c
        while len(nxt) > 1 and nxt[-1] == 0:
            nxt.pop()
        polys.append(nxt)
    return polys


def _poly_eval(coeffs: list[Fraction], x: Enclosure) -> Enclosure:
    acc = Enclosure(coeffs[-1])
    for c in reversed(coeffs[:-1]):
        acc = acc * x + Enclosure(c)
    return acc


def _n_pow(n: int, q: Fraction) -> Enclosure:
    """Enclosure of n**q for integer n >= 1 and rational q with denominator
    1 or 2 (exact integer power, then a certified square root if needed)."""
    if q.denominator == 1:
        return Enclosure(n ** int(q))
    if q.denominator == 2:
        return Enclosure(n ** int(q * 2)).sqrt()
    raise ValueError(f"unsupported exponent {q}")


def _tail_integral(j: int, sigma: Fraction, n_cut: int, log_n: Enclosure) -> Enclosure:
    """Enclosure of int_{n_cut}^inf (log t)^j t^(-sigma) dt, sigma > 1."""
    assert sigma > 1
    inv = Enclosure(1) / Enclosure(sigma - 1)
    total = Enclosure(0)
    coef = Fraction(1)  # j!/(j-r)!
    power = inv
    for r in range(j + 1):
        total = total + Enclosure(coef) * log_n ** (j - r) * power
        coef *= j - r
        power = power * inv
    return total / _n_pow(n_cut, sigma - 1)


@functools.lru_cache(maxsize=4)
def _log_cache(n_cut: int, precision: int) -> tuple:
    with working_precision(precision):
        return tuple(iv.log(iv.mpf(n)) for n in range(1, n_cut + 1))


def _bernoulli(idx: int) -> Fraction:
    p, q = bernfrac(idx)
    return Fraction(int(p), int(q))


def _euler_maclaurin(k: int, s: Fraction, precision: int) -> Enclosure:
    """Certified value of  sum_{n>=1} (log n)^k / n^s  for s > 1, or of the
    Stieltjes-regularized limit  lim (sum_{n<=x} - log^{k+1}x/(k+1))  for s = 1."""
    target = radius_target(precision)
    stieltjes_mode = s == 1
    with working_precision(precision):
        for n_cut, m_max in _SCHEDULE:
            log_n = Enclosure._wrap(_log_cache(n_cut, precision)[n_cut - 1])
            # pick the smallest correction order whose remainder beats the target
            chosen = None
            for m in range(3, m_max + 1):
                polys = _derivative_polys(k, s, 2 * m)
                bound = (
                    Enclosure(abs(_bernoulli(2 * m)) / _factorial(2 * m))
                    * _remainder_integral(polys[2 * m], s + 2 * m, n_cut, log_n)
                )
                if bound.upper_exact() <= target / 4:
                    chosen = (m, polys, bound)
                    break
            if chosen is None:
                continue
            m, polys, bound = chosen

            logs = _log_cache(n_cut, precision)
            total = iv.mpf(0)
            if stieltjes_mode:
                if k == 0:
                    for n in range(1, n_cut + 1):
                        total += iv.mpf(1) / n
                else:
                    for n in range(2, n_cut + 1):
                        total += logs[n - 1] ** k / n
            else:
                base = _em_term_denominators(s, n_cut)
                if k == 0:
                    for n in range(1, n_cut + 1):
                        total += base[n - 1]
                else:
                    for n in range(2, n_cut + 1):
                        total += logs[n - 1] ** k * base[n - 1]
            acc = Enclosure._wrap(total)

            if stieltjes_mode:
                acc = acc - log_n ** (k + 1) / (k + 1)
            else:
                acc = acc + _tail_integral(k, s, n_cut, log_n)
            # - f(N)/2
            acc = acc - _poly_eval(polys[0], log_n) / (_n_pow(n_cut, s) * 2)
            # - sum B_2j/(2j)! f^(2j-1)(N)
            for j in range(1, m + 1):
                b = _bernoulli(2 * j) / _factorial(2 * j)
                acc = acc - Enclosure(b) * _poly_eval(polys[2 * j - 1], log_n) / _n_pow(
                    n_cut, s + 2 * j - 1
                )
            result = acc + Enclosure.from_midrad(0, bound.upper_exact())
            if result.rad_exact() <= target:
                return result
    raise PrecisionError(
        f"cannot reach radius {float(target):.2e} for k={k}, s={s} "
        f"with the configured cutoff/order schedule"
    )


def _remainder_integral(
    coeffs: list[Fraction], sigma: Fraction, n_cut: int, log_n: Enclosure
) -> Enclosure:
    total = Enclosure(0)
    for i, c in enumerate(coeffs):
        if c:
            total = total + Enclosure(abs(c)) * _tail_integral(i, sigma, n_cut, log_n)
    return total


def _em_term_denominators(s: Fraction, n_cut: int) -> list:
    """Raw interval values of n^(-s) for n = 1..n_cut at ambient precision."""
    if s == 2:
        return [iv.mpf(1) / (n * n) for n in range(1, n_cut + 1)]
    if s == 3:
        return [iv.mpf(1) / (n * n * n) for n in range(1, n_cut + 1)]
    if s == Fraction(3, 2):
        return [1 / iv.sqrt(iv.mpf(n * n * n)) for n in range(1, n_cut + 1)]
    raise ValueError(f"unsupported exponent s={s}")


@functools.lru_cache(maxsize=None)
def _factorial(n: int) -> int:
    import math

    return math.factorial(n)


# -- public constant operations ------------------------------------------------


@functools.lru_cache(maxsize=None)
def stieltjes(k: int, precision: int = DEFAULT_PRECISION) -> Enclosure:
    """Enclosure of the Stieltjes constant gamma_k (gamma_0 is the
    Euler-Mascheroni constant), for k in {0, 1, 2}."""
    if k not in (0, 1, 2):
        raise ValueError("only Stieltjes indices 0, 1, 2 are supported")
    if precision < 64:
        raise ValueError("precision must be at least 64 bits")
    return _euler_maclaurin(k, Fraction(1), precision)


@functools.lru_cache(maxsize=None)
def zeta_derivative_at_2(order: int, precision: int = DEFAULT_PRECISION) -> Enclosure:
    """Enclosure of zeta^(order)(2) = (-1)^order * sum (log n)^order / n^2,
    for order in {0, 1, 2, 3}."""
    if order not in (0, 1, 2, 3):
        raise ValueError("only derivative orders 0..3 are supported")
    if precision < 64:
        raise ValueError("precision must be at least 64 bits")
    series = _euler_maclaurin(order, Fraction(2), precision)
    if order % 2 == 0:
        return series
    with working_precision(precision):  # negate at full precision
        return -series


@functools.lru_cache(maxsize=None)
def zeta_value(s, precision: int = DEFAULT_PRECISION) -> Enclosure:
    """Enclosure of zeta(s) for s in {3/2, 3}."""
    s = Fraction(s)
    if s not in (Fraction(3, 2), Fraction(3)):
        raise ValueError("only s = 3/2 and s = 3 are supported")
    if precision < 64:
        raise ValueError("precision must be at least 64 bits")
    return _euler_maclaurin(0, s, precision)


# -- the assembled table -------------------------------------------------------


@dataclass(frozen=True)
class ConstantsTable:
    """Immutable record of every constant the formulas consume."""

    precision_bits: int
    gamma: Enclosure
    gamma1: Enclosure
    gamma2: Enclosure
    zeta_d1_at2: Enclosure
    zeta_d2_at2: Enclosure
    zeta_d3_at2: Enclosure
    zeta_3half: Enclosure
    zeta_3: Enclosure
    C1: Enclosure
    C2: Enclosure
    C3: Enclosure
    C4: Enclosure
    D1: Enclosure
    D2: Enclosure
    D3: Enclosure
    D4: Enclosure
    H1: Enclosure
    H1p: Enclosure
    H1pp: Enclosure
    H1ppp: Enclosure
    Hstar_34: Enclosure
    F1: Enclosure
    beta: Enclosure
    alpha: Fraction = Fraction(397, 1000)
    x0: int = 5560
    c: Fraction = Fraction(1001, 1000)
    env1_coeff: Fraction = Fraction(448, 100)
    env2_coeff_a: Fraction = Fraction(973, 100)
    env2_coeff_b: Fraction = Fraction(73, 100)
    d4_clean: tuple[Fraction, int] = (Fraction(1, 3), 193)
    K_thresholds: tuple[tuple[Fraction, int], ...] = (
        (Fraction(1, 4), 433),
        (Fraction(1), 7),
    )

    def entries(self) -> Iterator[tuple[str, object, str]]:
        """(name, value, defining formula) rows for reporting."""
        yield "gamma", self.gamma, "lim sum_{n<=x} 1/n - log x"
        yield "gamma1", self.gamma1, "lim sum_{n<=x} log n/n - log^2(x)/2"
        yield "gamma2", self.gamma2, "lim sum_{n<=x} log^2(n)/n - log^3(x)/3"
        yield "zeta_d1_at2", self.zeta_d1_at2, "zeta'(2)"
        yield "zeta_d2_at2", self.zeta_d2_at2, "zeta''(2)"
        yield "zeta_d3_at2", self.zeta_d3_at2, "zeta'''(2)"
        yield "zeta_3half", self.zeta_3half, "zeta(3/2)"
        yield "zeta_3", self.zeta_3, "zeta(3)"
        yield "C1", self.C1, "1/6 (exact)"
        yield "C2", self.C2, "2*gamma - 1/2"
        yield "C3", self.C3, "6*gamma^2 - 4*gamma - 4*gamma1 + 1"
        yield (
            "C4",
            self.C4,
            "4*gamma^3 - 6*gamma^2 + 4*gamma - 12*gamma*gamma1 + 4*gamma1 + 2*gamma2 - 1",
        )
        yield "H1", self.H1, "6/pi^2"
        yield "H1p", self.H1p, "-72*zeta'(2)/pi^4"
        yield "H1pp", self.H1pp, "1728*zeta'(2)^2/pi^6 - 144*zeta''(2)/pi^4"
        yield (
            "H1ppp",
            self.H1ppp,
            "-62208*zeta'(2)^3/pi^8 + 10368*zeta'(2)*zeta''(2)/pi^6 - 288*zeta'''(2)/pi^4",
        )
        yield "D1", self.D1, "C1*H(1)  [= 1/pi^2]"
        yield "D2", self.D2, "C2*H(1) + 3*C1*H'(1)"
        yield "D3", self.D3, "C3*H(1) + 2*C2*H'(1) + 3*C1*H''(1)"
        yield "D4", self.D4, "C4*H(1) + C3*H'(1) + C2*H''(1) + C1*H'''(1)"
        yield "Hstar_34", self.Hstar_34, "zeta(3/2)/zeta(3)"
        yield "alpha", self.alpha, "0.397 (exact rational)"
        yield "x0", self.x0, "5560 (exact integer)"
        yield "c", self.c, "1.001 (exact rational)"
        yield "F1", self.F1, "2*c + 6*alpha + 2*alpha/log(x0)"
        yield "beta", self.beta, "alpha/2 + (3 - 2*gamma + alpha)/log(x0)"
        yield "env1_coeff", self.env1_coeff, "4.48 (exact rational)"
        yield "env2_coeff_a", self.env2_coeff_a, "9.73 (exact rational)"
        yield "env2_coeff_b", self.env2_coeff_b, "0.73 (exact rational)"
        yield "d4_clean", self.d4_clean, "(K, threshold) = (1/3, 193)"
        yield "K_thresholds", self.K_thresholds, "(K, threshold) pairs (1/4, 433), (1, 7)"


@functools.lru_cache(maxsize=8)
def build_constants_table(precision: int = DEFAULT_PRECISION) -> ConstantsTable:
    """Build (and cache) the full table at the given working precision."""
    if precision < 64:
        raise ValueError("precision must be at least 64 bits")
    g0 = stieltjes(0, precision)
    g1 = stieltjes(1, precision)
    g2 = stieltjes(2, precision)
    zd1 = zeta_derivative_at_2(1, precision)
    zd2 = zeta_derivative_at_2(2, precision)
    zd3 = zeta_derivative_at_2(3, precision)
    z32 = zeta_value(Fraction(3, 2), precision)
    z3 = zeta_value(3, precision)

    with working_precision(precision):
        pi = Enclosure.pi()
        pi2 = pi**2
        pi4 = pi**4
        pi6 = pi**6
        pi8 = pi**8

        C1 = Enclosure(Fraction(1, 6))
        C2 = 2 * g0 - Fraction(1, 2)
        C3 = 6 * g0**2 - 4 * g0 - 4 * g1 + 1
        C4 = 4 * g0**3 - 6 * g0**2 + 4 * g0 - 12 * g0 * g1 + 4 * g1 + 2 * g2 - 1

        H1 = 6 / pi2
        H1p = -72 * zd1 / pi4
        H1pp = 1728 * zd1**2 / pi6 - 144 * zd2 / pi4
        H1ppp = -62208 * zd1**3 / pi8 + 10368 * zd1 * zd2 / pi6 - 288 * zd3 / pi4

        D1 = C1 * H1
        D2 = C2 * H1 + 3 * C1 * H1p
        D3 = C3 * H1 + 2 * C2 * H1p + 3 * C1 * H1pp
        D4 = C4 * H1 + C3 * H1p + C2 * H1pp + C1 * H1ppp

        alpha = Fraction(397, 1000)
        c = Fraction(1001, 1000)
        x0 = 5560
        log_x0 = Enclosure(x0).log()
        F1 = Enclosure(2 * c) + Enclosure(6 * alpha) + 2 * Enclosure(alpha) / log_x0
        beta = Enclosure(alpha / 2) + (Enclosure(3) - 2 * g0 + Enclosure(alpha)) / log_x0

        return ConstantsTable(
            precision_bits=precision,
            gamma=g0,
            gamma1=g1,
            gamma2=g2,
            zeta_d1_at2=zd1,
            zeta_d2_at2=zd2,
            zeta_d3_at2=zd3,
            zeta_3half=z32,
            zeta_3=z3,
            C1=C1,
            C2=C2,
            C3=C3,
            C4=C4,
            D1=D1,
            D2=D2,
            D3=D3,
            D4=D4,
            H1=H1,
            H1p=H1p,
            H1pp=H1pp,
            H1ppp=H1ppp,
            Hstar_34=z32 / z3,
            F1=F1,
            beta=beta,
        )
