"""Certified midpoint-radius arithmetic.

An Enclosure is a closed interval guaranteed to contain the exact real value
it stands for.  All arithmetic rounds outward, so containment survives every
operation; precision only controls how tight the interval is.  The substrate
is mpmath's directed-rounding interval context (``mpmath.iv``); this module
adds the midpoint/radius view, exact rational endpoints, tri-state
comparisons, and explicit precision scoping.

Precision is ambient: operations evaluate at the interval context's current
precision, which `working_precision` scopes and restores.  Results computed
at low precision are wider but never wrong.
"""

from __future__ import annotations

import contextlib
import math
from fractions import Fraction
from typing import Iterator, Union

from mpmath import iv, mp
from mpmath.libmp import to_rational

__all__ = [
    "DEFAULT_PRECISION",
    "Enclosure",
    "working_precision",
]

DEFAULT_PRECISION = 256

NumberLike = Union[int, float, Fraction, str, "Enclosure"]


@contextlib.contextmanager
def working_precision(bits: int) -> Iterator[None]:
    """Scope the ambient binary precision for interval and display math."""
    if bits < 8:
        raise ValueError(f"precision too small: {bits}")
    old_iv, old_mp = iv.prec, mp.prec
    iv.prec = bits
    mp.prec = bits
    try:
        yield
    finally:
        iv.prec = old_iv
        mp.prec = old_mp


def _to_ival(value: NumberLike):
    if isinstance(value, Enclosure):
        return value._v
    if isinstance(value, Fraction):
        if value.denominator == 1:
            return iv.mpf(value.numerator)
        # exact rational: quotient of exact integers under directed rounding
        return iv.mpf(value.numerator) / iv.mpf(value.denominator)
    if isinstance(value, (int, float, str)):
        # ints and floats are exact inputs (floats are dyadic rationals);
        # decimal strings are rounded outward by the interval context
        return iv.mpf(value)
    raise TypeError(f"cannot build an enclosure from {type(value).__name__}")


def _from_endpoints(lo_raw, hi_raw):
    """Interval from raw libmp endpoints; outward rounding at ambient
    precision may widen it but never shrink it."""
    return iv.mpf([mp.make_mpf(lo_raw), mp.make_mpf(hi_raw)])


class Enclosure:
    """A real number carried as a certified interval."""

    __slots__ = ("_v",)

    def __init__(self, value: NumberLike):
        if type(value) is iv.mpf:
            self._v = value
        else:
            self._v = _to_ival(value)

    # -- construction helpers ------------------------------------------------

    @classmethod
    def _wrap(cls, ival) -> "Enclosure":
        out = cls.__new__(cls)
        out._v = ival
        return out

    @classmethod
    def from_midrad(cls, mid: NumberLike, rad: NumberLike) -> "Enclosure":
        r = cls(rad)
        if r.lower_exact() < 0:
            raise ValueError("radius must be nonnegative")
        hi = r._v._mpi_[1]
        neg = (-r)._v._mpi_[0]
        return cls(mid) + cls._wrap(_from_endpoints(neg, hi))

    @classmethod
    def pi(cls) -> "Enclosure":
        return cls._wrap(+iv.pi)

    @classmethod
    def euler_gamma_reference(cls) -> "Enclosure":
        """The interval library's own certified Euler-Mascheroni constant;
        used only as a cross-check oracle, never as the table value."""
        return cls._wrap(+iv.euler)

    # -- exact endpoint access ----------------------------------------------

    def lower_exact(self) -> Fraction:
        sign, man, exp, bc = self._v._mpi_[0]
        if man == 0 and exp != 0:
            raise OverflowError("non-finite interval endpoint")
        return Fraction(*to_rational(self._v._mpi_[0]))

    def upper_exact(self) -> Fraction:
        sign, man, exp, bc = self._v._mpi_[1]
        if man == 0 and exp != 0:
            raise OverflowError("non-finite interval endpoint")
        return Fraction(*to_rational(self._v._mpi_[1]))

    def mid_exact(self) -> Fraction:
        return (self.lower_exact() + self.upper_exact()) / 2

    def rad_exact(self) -> Fraction:
        return (self.upper_exact() - self.lower_exact()) / 2

    @property
    def mid(self) -> float:
        return float(self.mid_exact())

    @property
    def rad(self) -> float:
        r = self.rad_exact()
        f = float(r)
        if Fraction(f) < r:  # never under-report the radius as a double
            f = math.nextafter(f, math.inf)
        return f

    def __float__(self) -> float:
        return self.mid

    # -- arithmetic ----------------------------------------------------------

    def __add__(self, other: NumberLike) -> "Enclosure":
        return Enclosure._wrap(self._v + _to_ival(other))

    __radd__ = __add__

    def __sub__(self, other: NumberLike) -> "Enclosure":
        return Enclosure._wrap(self._v - _to_ival(other))

    def __rsub__(self, other: NumberLike) -> "Enclosure":
        return Enclosure._wrap(_to_ival(other) - self._v)

    def __mul__(self, other: NumberLike) -> "Enclosure":
        return Enclosure._wrap(self._v * _to_ival(other))

    __rmul__ = __mul__

    def __truediv__(self, other: NumberLike) -> "Enclosure":
        return Enclosure._wrap(self._v / _to_ival(other))

    def __rtruediv__(self, other: NumberLike) -> "Enclosure":
        return Enclosure._wrap(_to_ival(other) / self._v)

    def __neg__(self) -> "Enclosure":
        return Enclosure._wrap(-self._v)

    def __abs__(self) -> "Enclosure":
        lo, hi = self.lower_exact(), self.upper_exact()
        if lo >= 0:
            return self
        if hi <= 0:
            return -self
        # straddles zero: |interval| = [0, max(-lo, hi)]
        big = (-self)._v._mpi_[1] if -lo >= hi else self._v._mpi_[1]
        zero = iv.mpf(0)._mpi_[0]
        return Enclosure._wrap(_from_endpoints(zero, big))

    def __pow__(self, exponent: Union[int, Fraction]) -> "Enclosure":
        if isinstance(exponent, int) or (
            isinstance(exponent, Fraction) and exponent.denominator == 1
        ):
            return Enclosure._wrap(self._v ** int(exponent))
        if not isinstance(exponent, Fraction):
            raise TypeError("exponent must be an int or a Fraction")
        if self.lower_exact() <= 0:
            raise ValueError("fractional power of a nonpositive enclosure")
        return Enclosure._wrap(self._v ** _to_ival(exponent))

    def hull(self, other: NumberLike) -> "Enclosure":
        o = other if isinstance(other, Enclosure) else Enclosure(other)
        lo_raw = (
            self._v._mpi_[0]
            if self.lower_exact() <= o.lower_exact()
            else o._v._mpi_[0]
        )
        hi_raw = (
            self._v._mpi_[1]
            if self.upper_exact() >= o.upper_exact()
            else o._v._mpi_[1]
        )
        return Enclosure._wrap(_from_endpoints(lo_raw, hi_raw))

    def log(self) -> "Enclosure":
        if self.lower_exact() <= 0:
            raise ValueError("log of a nonpositive enclosure")
        return Enclosure._wrap(iv.log(self._v))

    def exp(self) -> "Enclosure":
        return Enclosure._wrap(iv.exp(self._v))

    def sqrt(self) -> "Enclosure":
        if self.lower_exact() < 0:
            raise ValueError("sqrt of a negative enclosure")
        return Enclosure._wrap(iv.sqrt(self._v))

    # -- predicates ----------------------------------------------------------

    def contains(self, value: Union[int, float, Fraction, "Enclosure"]) -> bool:
        if isinstance(value, Enclosure):
            return (
                self.lower_exact() <= value.lower_exact()
                and value.upper_exact() <= self.upper_exact()
            )
        v = Fraction(value)
        return self.lower_exact() <= v <= self.upper_exact()

    def is_subset_of(self, other: "Enclosure") -> bool:
        return other.contains(self)

    def intersects(self, other: "Enclosure") -> bool:
        return (
            self.lower_exact() <= other.upper_exact()
            and other.lower_exact() <= self.upper_exact()
        )

    def _other_bounds(self, other: NumberLike) -> tuple[Fraction, Fraction]:
        if isinstance(other, Enclosure):
            return other.lower_exact(), other.upper_exact()
        if isinstance(other, (int, Fraction, float)):
            v = Fraction(other)
            return v, v
        e = Enclosure(other)
        return e.lower_exact(), e.upper_exact()

    def certainly_le(self, other: NumberLike) -> bool:
        lo, _ = self._other_bounds(other)
        return self.upper_exact() <= lo

    def certainly_lt(self, other: NumberLike) -> bool:
        lo, _ = self._other_bounds(other)
        return self.upper_exact() < lo

    def certainly_ge(self, other: NumberLike) -> bool:
        _, hi = self._other_bounds(other)
        return self.lower_exact() >= hi

    def certainly_gt(self, other: NumberLike) -> bool:
        _, hi = self._other_bounds(other)
        return self.lower_exact() > hi

    def possibly_gt(self, other: NumberLike) -> bool:
        return not self.certainly_le(other)

    def possibly_lt(self, other: NumberLike) -> bool:
        return not self.certainly_ge(other)

    # -- decimal views -------------------------------------------------------

    def truncate_decimal(self, places: int) -> Fraction | None:
        """Toward-zero truncation to `places` decimal digits, or None when
        the interval straddles a truncation boundary (digits undetermined)."""
        scale = 10**places
        lo, hi = self.lower_exact() * scale, self.upper_exact() * scale

        def trunc(q: Fraction) -> int:
            if q >= 0:
                return q.numerator // q.denominator
            return -((-q.numerator) // q.denominator)

        a, b = trunc(lo), trunc(hi)
        if a != b:
            return None
        return Fraction(a, scale)

    def decimal_str(self, digits: int = 25) -> str:
        m = self.mid_exact()
        with working_precision(max(64, int(digits * 3.4) + 16)):
            return mp.nstr(mp.mpf(m.numerator) / m.denominator, digits)

    def __repr__(self) -> str:
        return f"Enclosure({float(self.mid_exact()):.17g} ± {float(self.rad_exact()):.3g})"
