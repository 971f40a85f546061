"""Tests for the certified interval arithmetic substrate.

The one property everything else leans on is containment: an Enclosure built
from an exact value contains that value, and containment survives every
arithmetic operation regardless of the ambient precision.  Precision only
controls width.
"""

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from divisum import Enclosure, working_precision

# Reference digit strings, independent of anything the package computes.
PI_50 = Fraction("3.14159265358979323846264338327950288419716939937510")
GAMMA_50 = Fraction("0.57721566490153286060651209008240243104215933593992")

rationals = st.fractions(
    min_value=Fraction(-(10**6)), max_value=Fraction(10**6), max_denominator=10**4
)


class TestConstruction:
    def test_int_is_exact(self):
        e = Enclosure(7)
        assert e.lower_exact() == 7
        assert e.upper_exact() == 7
        assert e.rad_exact() == 0

    def test_float_is_exact_dyadic(self):
        e = Enclosure(0.5)
        assert e.lower_exact() == Fraction(1, 2)
        assert e.upper_exact() == Fraction(1, 2)

    def test_fraction_contains_value(self):
        q = Fraction(1, 3)
        with working_precision(256):
            e = Enclosure(q)
        assert e.contains(q)
        assert e.rad_exact() > 0  # 1/3 is not dyadic
        assert e.rad_exact() < Fraction(1, 10**70)

    def test_decimal_string_contains_value(self):
        e = Enclosure("0.1")
        assert e.contains(Fraction(1, 10))
        assert e.rad_exact() > 0

    def test_rejects_unknown_type(self):
        with pytest.raises(TypeError):
            Enclosure(object())

    def test_from_midrad_covers_both_endpoints(self):
        e = Enclosure.from_midrad(Fraction(3), Fraction(1, 4))
        assert e.contains(Fraction(11, 4))
        assert e.contains(Fraction(13, 4))
        assert e.rad_exact() >= Fraction(1, 4)

    def test_from_midrad_rejects_negative_radius(self):
        with pytest.raises(ValueError):
            Enclosure.from_midrad(0, -1)

    def test_pi_contains_reference_digits(self):
        # 50 reference digits pin pi to 1e-50; a 256-bit enclosure must agree
        with working_precision(256):
            e = Enclosure.pi()
        assert abs(e.mid_exact() - PI_50) < Fraction(1, 10**49)
        assert e.rad_exact() < Fraction(1, 10**70)

    def test_euler_gamma_reference_digits(self):
        with working_precision(256):
            e = Enclosure.euler_gamma_reference()
        assert abs(e.mid_exact() - GAMMA_50) < Fraction(1, 10**49)
        assert e.rad_exact() < Fraction(1, 10**70)


class TestArithmeticContainment:
    @given(a=rationals, b=rationals)
    @settings(max_examples=80, deadline=None)
    def test_ring_ops_contain_exact_result(self, a, b):
        ea, eb = Enclosure(a), Enclosure(b)
        assert (ea + eb).contains(a + b)
        assert (ea - eb).contains(a - b)
        assert (ea * eb).contains(a * b)
        if b != 0:
            assert (ea / eb).contains(a / b)

    @given(a=rationals)
    @settings(max_examples=50, deadline=None)
    def test_unary_ops(self, a):
        e = Enclosure(a)
        assert (-e).contains(-a)
        assert abs(e).contains(abs(a))
        assert (e**3).contains(a**3)

    @given(a=rationals, b=rationals)
    @settings(max_examples=50, deadline=None)
    def test_mixed_operands_promote(self, a, b):
        # int / Fraction on either side of the operator behave like Enclosures
        e = Enclosure(a)
        assert (e + b).contains(a + b)
        assert (b + e).contains(a + b)
        assert (e - b).contains(a - b)
        assert (b - e).contains(b - a)
        assert (e * 3).contains(a * 3)
        if a != 0:
            assert (1 / e).contains(1 / a)

    def test_abs_straddling_zero(self):
        e = Enclosure.from_midrad(0, 2)  # roughly [-2, 2]
        a = abs(e)
        assert a.lower_exact() >= 0
        assert a.contains(0)
        assert a.contains(2)

    def test_sqrt_squares_back(self):
        for q in (Fraction(2), Fraction(10, 7), Fraction(144)):
            s = Enclosure(q).sqrt()
            assert (s * s).contains(q)

    def test_log_exp_roundtrip(self):
        q = Fraction(7, 3)
        r = Enclosure(q).log().exp()
        assert r.contains(q)

    def test_fractional_power(self):
        e = Enclosure(2) ** Fraction(3, 4)
        assert (e ** Fraction(4, 3)).contains(2)

    def test_fractional_power_requires_positive_base(self):
        with pytest.raises(ValueError):
            Enclosure(-1) ** Fraction(1, 2)

    def test_fractional_power_rejects_float_exponent(self):
        with pytest.raises(TypeError):
            Enclosure(2) ** 0.5

    def test_log_rejects_nonpositive(self):
        with pytest.raises(ValueError):
            Enclosure(0).log()

    def test_sqrt_rejects_negative(self):
        with pytest.raises(ValueError):
            Enclosure(-4).sqrt()


class TestPredicates:
    def test_certainly_orders_disjoint(self):
        a, b = Enclosure(1), Enclosure(2)
        assert a.certainly_le(b)
        assert a.certainly_lt(b)
        assert b.certainly_ge(a)
        assert b.certainly_gt(a)
        assert not a.certainly_ge(b)

    def test_touching_endpoints_le_but_not_lt(self):
        a = Enclosure(1)
        assert a.certainly_le(1)
        assert not a.certainly_lt(1)
        assert a.certainly_ge(1)
        assert not a.certainly_gt(1)

    def test_overlap_is_undecided(self):
        a = Enclosure.from_midrad(0, 1)
        b = Enclosure.from_midrad(Fraction(1, 2), 1)
        assert not a.certainly_le(b)
        assert not a.certainly_ge(b)
        assert a.possibly_lt(b)
        assert a.possibly_gt(b)

    def test_hull_contains_both(self):
        a = Enclosure(Fraction(1, 3))
        b = Enclosure(5)
        h = a.hull(b)
        assert h.contains(Fraction(1, 3))
        assert h.contains(5)
        assert a.is_subset_of(h) and b.is_subset_of(h)

    def test_intersects(self):
        a = Enclosure.from_midrad(0, 1)
        assert a.intersects(Enclosure(1))
        assert not a.intersects(Enclosure(3))

    def test_contains_enclosure_means_subset(self):
        outer = Enclosure.from_midrad(0, 2)
        inner = Enclosure.from_midrad(0, 1)
        assert outer.contains(inner)
        assert not inner.contains(outer)


class TestPrecisionScoping:
    def test_higher_precision_is_tighter(self):
        q = Fraction(1, 3)
        with working_precision(64):
            wide = Enclosure(q)
        with working_precision(256):
            tight = Enclosure(q)
        assert tight.rad_exact() < wide.rad_exact()
        assert wide.contains(q) and tight.contains(q)

    def test_precision_restored_after_scope(self):
        before = Enclosure(Fraction(1, 3)).rad_exact()
        with working_precision(64):
            pass
        after = Enclosure(Fraction(1, 3)).rad_exact()
        assert before == after

    def test_restored_on_exception(self):
        before = Enclosure(Fraction(1, 7)).rad_exact()
        with pytest.raises(RuntimeError):
            with working_precision(64):
                raise RuntimeError("boom")
        assert Enclosure(Fraction(1, 7)).rad_exact() == before

    def test_rejects_tiny_precision(self):
        with pytest.raises(ValueError):
            with working_precision(4):
                pass

    def test_low_precision_still_contains(self):
        with working_precision(16):
            e = (Enclosure(Fraction(1, 3)) * 3 - 1) * 10**6
        assert e.contains(0)

    def test_rad_float_never_under_reports(self):
        e = Enclosure(Fraction(1, 3))
        assert Fraction(e.rad) >= e.rad_exact()


class TestDecimalViews:
    def test_truncate_decimal_exact(self):
        e = Enclosure(Fraction(123456, 100000))
        assert e.truncate_decimal(3) == Fraction(1234, 1000)

    def test_truncate_decimal_negative_truncates_toward_zero(self):
        e = Enclosure(Fraction(-123456, 100000))
        assert e.truncate_decimal(3) == Fraction(-1234, 1000)

    def test_truncate_decimal_straddle_returns_none(self):
        # interval crosses the 1.234|1.235 digit boundary
        e = Enclosure.from_midrad(Fraction(1235, 1000), Fraction(1, 10**6))
        assert e.truncate_decimal(3) is None

    def test_decimal_str_shows_leading_digits(self):
        s = Enclosure(Fraction(1, 3)).decimal_str(10)
        assert s.startswith("0.333333333")

    def test_float_conversion_is_midpoint(self):
        e = Enclosure.from_midrad(Fraction(5, 2), Fraction(1, 2))
        assert float(e) == e.mid
