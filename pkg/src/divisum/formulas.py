"""Main-term polynomials, auxiliary logarithmic sums, and error envelopes.

Every bound this package verifies has the shape

    |S(x) - x * P(log x)| <= E(x)        (FULL specs, P cubic)
    S(x)                  <= E(x)        (CLEAN specs, E = K * x * log^3 x)

where S is one of the divisor summatory functions.  This module evaluates
the P and E sides in certified enclosure arithmetic, together with the
auxiliary sums S1, S2, S3 (exact and approximate forms) and the older
reference bounds used for comparisons.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from mpmath import iv

from divisum.constants import ConstantsTable, build_constants_table
from divisum.enclosure import DEFAULT_PRECISION, Enclosure, working_precision
from divisum.errors import CapacityError, DomainError
from divisum.kernels import DEFAULT_SEGMENT_SIZE, primes_upto
from divisum.kernels.tables import Kind, _block_values

__all__ = [
    "ApproxResult",
    "PriorBound",
    "SpecKind",
    "TheoremSpec",
    "default_table",
    "delta_of_x",
    "envelope",
    "main_term",
    "main_term_d4",
    "main_term_dsq",
    "prior_bound",
    "S1_exact",
    "S2_exact",
    "S3_exact",
    "S1_approx",
    "S2_approx",
    "S3_approx",
    "theorem_specs",
]


@lru_cache(maxsize=4)
def default_table(precision: int = DEFAULT_PRECISION) -> ConstantsTable:
    """Shared read-only constants table (built once per precision)."""
    return build_constants_table(precision)


class SpecKind(enum.Enum):
    D4_FULL = "d4-full"
    D4_CLEAN = "d4-clean"
    DSQ_FULL = "dsq-full"
    DSQ_CLEAN = "dsq-clean"


_CLEAN_KINDS = (SpecKind.D4_CLEAN, SpecKind.DSQ_CLEAN)


@dataclass(frozen=True)
class TheoremSpec:
    """One verifiable bound.

    main_term holds the cubic's enclosure coefficients highest degree
    first, so the full main term is x * (c3 L^3 + c2 L^2 + c1 L + c0)
    with L = log x; it is empty for CLEAN kinds.  envelope terms are
    (coefficient, x_power, log_power) with exact rational coefficient
    and power.
    """

    name: str
    kind: SpecKind
    summatory_kind: Kind
    main_term: tuple[Enclosure, ...]
    envelope: tuple[tuple[Fraction, Fraction, int], ...]
    threshold: int

    def __post_init__(self):
        if self.kind in _CLEAN_KINDS:
            if self.main_term:
                raise ValueError("CLEAN specs carry no main term")
            if len(self.envelope) != 1:
                raise ValueError("CLEAN specs have exactly one envelope term")
        else:
            if len(self.main_term) != 4:
                raise ValueError("FULL specs need a degree-3 main term")
        if self.threshold < 2:
            raise ValueError("threshold must be at least 2")

    @property
    def two_sided(self) -> bool:
        return self.kind not in _CLEAN_KINDS


def theorem_specs(table: ConstantsTable | None = None) -> dict[str, TheoremSpec]:
    """The registry of verifiable bounds, keyed by name."""
    t = table if table is not None else default_table()
    quarter, x_quarter = t.K_thresholds[0]
    unit, x_unit = t.K_thresholds[1]
    k_clean, x_clean = t.d4_clean
    half = Fraction(1, 2)
    three_q = Fraction(3, 4)
    specs = [
        TheoremSpec(
            "d4-full", SpecKind.D4_FULL, Kind.D4,
            (t.C1, t.C2, t.C3, t.C4),
            ((t.env1_coeff, three_q, 1),), 2,
        ),
        TheoremSpec(
            "d4-clean", SpecKind.D4_CLEAN, Kind.D4,
            (), ((k_clean, Fraction(1), 3),), x_clean,
        ),
        TheoremSpec(
            "dsq-full", SpecKind.DSQ_FULL, Kind.DSQ,
            (t.D1, t.D2, t.D3, t.D4),
            ((t.env2_coeff_a, three_q, 1), (t.env2_coeff_b, half, 0)), 2,
        ),
        TheoremSpec(
            "dsq-clean-quarter", SpecKind.DSQ_CLEAN, Kind.DSQ,
            (), ((quarter, Fraction(1), 3),), x_quarter,
        ),
        TheoremSpec(
            "dsq-clean-unit", SpecKind.DSQ_CLEAN, Kind.DSQ,
            (), ((unit, Fraction(1), 3),), x_unit,
        ),
    ]
    return {s.name: s for s in specs}


# -- evaluation helpers -------------------------------------------------------


def _point(x, minimum: Fraction | int, what: str) -> Enclosure:
    e = Enclosure(x)
    if e.lower_exact() < minimum:
        raise DomainError(f"{what} requires x >= {minimum}, got {x}")
    return e


def _cubic_main(x: Enclosure, coeffs) -> Enclosure:
    c3, c2, c1, c0 = coeffs
    L = x.log()
    return x * (((c3 * L + c2) * L + c1) * L + c0)


def main_term_d4(x, table: ConstantsTable | None = None) -> Enclosure:
    """x * (C1 log^3 x + C2 log^2 x + C3 log x + C4)."""
    t = table if table is not None else default_table()
    with working_precision(t.precision_bits):
        xe = _point(x, 1, "main term")
        return _cubic_main(xe, (t.C1, t.C2, t.C3, t.C4))


def main_term_dsq(x, table: ConstantsTable | None = None) -> Enclosure:
    """x * (D1 log^3 x + D2 log^2 x + D3 log x + D4)."""
    t = table if table is not None else default_table()
    with working_precision(t.precision_bits):
        xe = _point(x, 1, "main term")
        return _cubic_main(xe, (t.D1, t.D2, t.D3, t.D4))


def main_term(spec: TheoremSpec, x, precision: int = DEFAULT_PRECISION) -> Enclosure:
    """The spec's main term at x (identically zero for CLEAN specs)."""
    with working_precision(precision):
        xe = _point(x, 1, "main term")
        if not spec.main_term:
            return Enclosure(0)
        return _cubic_main(xe, spec.main_term)


def envelope(spec: TheoremSpec, x, precision: int = DEFAULT_PRECISION) -> Enclosure:
    """Sum of coeff * x^p * (log x)^q over the spec's envelope terms."""
    with working_precision(precision):
        xe = _point(x, 1, "envelope")
        L = xe.log()
        total = Enclosure(0)
        for coef, xpow, lpow in spec.envelope:
            term = Enclosure(coef) * xe**xpow
            for _ in range(lpow):
                term = term * L
            total = total + term
        return total


def delta_of_x(x: int, table: ConstantsTable | None = None) -> Enclosure:
    """Divisor remainder: sum_{n<=x} d(n) - x(log x + 2 gamma - 1)."""
    from divisum.kernels import summatory_d_exact

    n = int(x)
    if n != x or n < 1:
        raise DomainError(f"remainder is defined at integers >= 1, got {x}")
    s = summatory_d_exact(n).value
    t = table if table is not None else default_table()
    with working_precision(t.precision_bits):
        xe = Enclosure(n)
        return Enclosure(s) - xe * (xe.log() + 2 * t.gamma - 1)


# -- auxiliary sums S1, S2, S3 ------------------------------------------------


def _weighted_sum(x: int, weight: str, precision: int) -> Enclosure:
    n_top = int(x)
    if n_top < 1:
        raise DomainError(f"auxiliary sums need x >= 1, got {x}")
    if n_top > DEFAULT_SEGMENT_SIZE:
        raise CapacityError(
            f"direct auxiliary summation is limited to x <= {DEFAULT_SEGMENT_SIZE}"
        )
    primes = primes_upto(math.isqrt(n_top))
    with working_precision(precision):
        acc = iv.mpf(0)
        for lo in range(1, n_top + 1, 1 << 16):
            hi = min(lo + (1 << 16), n_top + 1)
            dv = _block_values(Kind.D, lo, hi, primes).tolist()
            n = lo
            # raw interval ops here: one wrapped op per term would triple
            # the cost of these long loops
            if weight == "inv":
                for d in dv:
                    acc += iv.mpf(d) / n
                    n += 1
            elif weight == "loginv":
                for d in dv:
                    if n > 1:
                        acc += iv.log(n) * d / n
                    n += 1
            else:
                for d in dv:
                    acc += d / iv.sqrt(iv.mpf(n))
                    n += 1
        return Enclosure._wrap(acc)


def S1_exact(x: int, precision: int = DEFAULT_PRECISION) -> Enclosure:
    """sum_{n<=x} d(n)/n with outward rounding."""
    return _weighted_sum(x, "inv", precision)


def S2_exact(x: int, precision: int = DEFAULT_PRECISION) -> Enclosure:
    """sum_{n<=x} d(n) log(n)/n with outward rounding."""
    return _weighted_sum(x, "loginv", precision)


def S3_exact(x: int, precision: int = DEFAULT_PRECISION) -> Enclosure:
    """sum_{n<=x} d(n)/sqrt(n) with outward rounding."""
    return _weighted_sum(x, "sqrtinv", precision)


@dataclass(frozen=True)
class ApproxResult:
    """Closed-form approximation with its error radius.

    When `certified` is true the exact sum is guaranteed to lie within
    main +/- radius; below the certified range the radius is still the
    nominal formula value but carries no guarantee.
    """

    main: Enclosure
    radius: Enclosure
    certified: bool


def S1_approx(x, table: ConstantsTable | None = None) -> ApproxResult:
    """log^2(x)/2 + 2 gamma log x + gamma^2 - 2 gamma1, radius c/sqrt(x)."""
    t = table if table is not None else default_table()
    with working_precision(t.precision_bits):
        xe = _point(x, 1, "S1 approximation")
        L = xe.log()
        main = L * L / 2 + 2 * t.gamma * L + t.gamma**2 - 2 * t.gamma1
        radius = Enclosure(t.c) * xe ** Fraction(-1, 2)
        return ApproxResult(main, radius, xe.lower_exact() >= 2)


def S2_approx(x, table: ConstantsTable | None = None) -> ApproxResult:
    """log^3(x)/3 + gamma log^2 x + 2 gamma gamma1 - gamma2, radius
    alpha (3 + 2/log x0) log(x)/sqrt(x), certified from x0 on."""
    t = table if table is not None else default_table()
    with working_precision(t.precision_bits):
        xe = _point(x, 1, "S2 approximation")
        L = xe.log()
        main = L * L * L / 3 + t.gamma * L * L + 2 * t.gamma * t.gamma1 - t.gamma2
        coef = Enclosure(t.alpha) * (3 + 2 / Enclosure(t.x0).log())
        radius = coef * xe ** Fraction(-1, 2) * L
        return ApproxResult(main, radius, xe.lower_exact() >= t.x0)


def S3_approx(x, table: ConstantsTable | None = None) -> ApproxResult:
    """2 sqrt(x) log x + 4(gamma - 1) sqrt(x), radius beta log x,
    certified from x0 on."""
    t = table if table is not None else default_table()
    with working_precision(t.precision_bits):
        xe = _point(x, 1, "S3 approximation")
        L = xe.log()
        root = xe.sqrt()
        main = 2 * root * L + 4 * (t.gamma - 1) * root
        radius = t.beta * L
        return ApproxResult(main, radius, xe.lower_exact() >= t.x0)


# -- older reference bounds ---------------------------------------------------


class PriorBound(enum.Enum):
    HALL = "hall"
    LOUNGE = "lounge"
    GAMES = "games"
    KITCHEN = "kitchen"


def prior_bound(
    name: PriorBound | str,
    x,
    k: int = 4,
    table: ConstantsTable | None = None,
) -> Enclosure:
    """One of the earlier general upper bounds, evaluated at x."""
    bound = PriorBound[name.upper()] if isinstance(name, str) else name
    t = table if table is not None else default_table()
    if bound is not PriorBound.KITCHEN and k != 4:
        raise DomainError(f"{bound.name} is only wired for k = 4, got k = {k}")
    with working_precision(t.precision_bits):
        minimum = 6 if bound is PriorBound.GAMES else 1
        xe = _point(x, minimum, bound.name)
        L = xe.log()
        if bound is PriorBound.HALL:
            return xe * (L + t.gamma + 1 / xe) ** 3
        if bound is PriorBound.LOUNGE:
            return xe / 6 * (L + 3) ** 3
        if bound is PriorBound.GAMES:
            return 2 * xe * L**3
        return xe * (L + 1) ** 3
