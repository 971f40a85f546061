"""Tests for Minkowski bounds and the class-number caps.

The worked examples are classical: the totally imaginary quartic field of
discriminant 125 and the totally real quartic field of discriminant 725
both have tiny Minkowski bounds, so their class-number caps pin down to
small exact integers.  Larger synthetic inputs exercise the closed-form
cap and the exact-vs-formula ordering.
"""

import io
from fractions import Fraction

import pytest

from divisum import Enclosure
from divisum.class_bounds import (
    BatchRow,
    ClassBoundResult,
    NumberFieldInput,
    batch_class_bounds,
    class_bound_exact,
    class_bound_for_field,
    class_bound_formula,
    minkowski_bound,
    write_batch_csv,
)
from divisum.errors import DomainError, IndeterminateFloorError, SignatureError


class TestFieldInput:
    def test_valid_signatures(self):
        NumberFieldInput(4, 4, 0, 725)
        NumberFieldInput(4, 0, 2, 125)
        NumberFieldInput(4, 2, 1, 275)
        NumberFieldInput(2, 0, 1, 4)
        NumberFieldInput(3, 1, 1, 23)

    def test_degree_guard(self):
        with pytest.raises(DomainError):
            NumberFieldInput(5, 5, 0, 10)
        with pytest.raises(DomainError):
            NumberFieldInput(1, 1, 0, 10)

    def test_signature_arithmetic_guard(self):
        with pytest.raises(SignatureError):
            NumberFieldInput(4, 3, 1, 10)
        with pytest.raises(SignatureError):
            NumberFieldInput(4, -2, 3, 10)

    def test_discriminant_guard(self):
        with pytest.raises(DomainError):
            NumberFieldInput(4, 4, 0, 0)

    def test_fraction_discriminant_accepted(self):
        f = NumberFieldInput(4, 4, 0, Fraction(1024, 9))
        assert f.abs_disc == Fraction(1024, 9)


class TestMinkowskiBound:
    def test_totally_imaginary_quartic_disc_125(self):
        b = minkowski_bound(NumberFieldInput(4, 0, 2, 125))
        # (3/32) (4/pi)^2 sqrt(125)
        assert b.mid == pytest.approx(1.6992079063875525, rel=1e-14)
        assert b.rad < 1e-25

    def test_totally_real_quartic_disc_725(self):
        b = minkowski_bound(NumberFieldInput(4, 4, 0, 725))
        assert b.mid == pytest.approx(2.5242960033442987, rel=1e-14)

    def test_totally_real_prefactor_is_exact(self):
        # (3/32) sqrt(1024/9) = 1 with no interval width at all
        b = minkowski_bound(NumberFieldInput(4, 4, 0, Fraction(1024, 9)))
        assert b.lower_exact() == 1 == b.upper_exact()

    def test_degree_two_gaussian(self):
        b = minkowski_bound(NumberFieldInput(2, 0, 1, 4))
        # (1/2) * (4/pi) * 2 = 4/pi
        assert (b * Enclosure.pi()).contains(4)
        assert b.mid == pytest.approx(1.2732395447351628, rel=1e-14)

    def test_degree_three(self):
        b = minkowski_bound(NumberFieldInput(3, 1, 1, 23))
        assert b.mid == pytest.approx(1.3569427434153842, rel=1e-14)

    def test_higher_precision_nests(self):
        f = NumberFieldInput(4, 0, 2, 125)
        wide = minkowski_bound(f, 128)
        tight = minkowski_bound(f, 512)
        assert tight.is_subset_of(wide)
        assert tight.rad_exact() < wide.rad_exact()


class TestExactCap:
    def test_small_bounds(self):
        assert class_bound_exact(1) == 1
        assert class_bound_exact(Fraction(3, 2)) == 1
        assert class_bound_exact(2) == 5
        assert class_bound_exact(4) == 19
        assert class_bound_exact(193) == 9333

    def test_enclosure_input(self):
        assert class_bound_exact(Enclosure(10)) == 89

    def test_below_one_rejected(self):
        with pytest.raises(DomainError):
            class_bound_exact(Fraction(1, 2))

    def test_straddling_enclosure_without_refine(self):
        fuzzy = Enclosure.from_midrad(5, Fraction(1, 10))  # covers 4.9..5.1
        with pytest.raises(IndeterminateFloorError):
            class_bound_exact(fuzzy)

    def test_straddling_enclosure_with_refine(self):
        fuzzy = Enclosure.from_midrad(Fraction(49, 10), Fraction(2, 10))

        def refine(prec):
            # a refinement that actually tightens: the true value is 4.9
            return Enclosure.from_midrad(Fraction(49, 10), Fraction(1, 10**6))

        assert class_bound_exact(fuzzy, refine=refine) == 19

    def test_refine_that_never_settles(self):
        fuzzy = Enclosure.from_midrad(5, Fraction(1, 10))
        with pytest.raises(IndeterminateFloorError):
            class_bound_exact(fuzzy, refine=lambda prec: fuzzy)


class TestFormulaCap:
    def test_frozen_value_at_193(self):
        f = class_bound_formula(193)
        assert f.mid == pytest.approx(9376.903934176771, rel=1e-13)

    def test_below_validity_rejected(self):
        with pytest.raises(DomainError):
            class_bound_formula(192)
        class_bound_formula(193)  # boundary is allowed

    def test_exact_never_worse_than_formula(self):
        for b in (193, 500, 2048, 10**4):
            exact = class_bound_exact(b)
            formula = class_bound_formula(b)
            assert exact <= formula.upper_exact(), b

    def test_monotone_in_b(self):
        prev = class_bound_formula(193)
        for b in (250, 400, 1000):
            cur = class_bound_formula(b)
            assert cur.certainly_gt(prev)
            prev = cur


class TestFieldPipeline:
    def test_disc_125_gives_class_number_one(self):
        r = class_bound_for_field(NumberFieldInput(4, 0, 2, 125))
        assert r.bound_exact == 1
        assert r.bound_formula is None
        assert "closed form needs b >= 193" in r.method_note

    def test_disc_725_gives_five(self):
        r = class_bound_for_field(NumberFieldInput(4, 4, 0, 725))
        assert r.bound_exact == 5
        assert r.bound_formula is None

    def test_large_synthetic_reports_both_caps(self):
        # |d| chosen so b = (3/32) sqrt(|d|) = 300 exactly
        d = Fraction(300 * 32, 3) ** 2
        r = class_bound_for_field(NumberFieldInput(4, 4, 0, d))
        assert r.b.lower_exact() == 300 == r.b.upper_exact()
        assert r.bound_exact == class_bound_exact(300)
        assert r.bound_formula is not None
        assert r.bound_exact <= r.bound_formula.upper_exact()
        assert str(r.bound_exact) in r.method_note

    def test_non_quartic_rejected(self):
        with pytest.raises(DomainError):
            class_bound_for_field(NumberFieldInput(2, 0, 1, 4))

    def test_result_is_frozen_dataclass(self):
        r = class_bound_for_field(NumberFieldInput(4, 0, 2, 125))
        assert isinstance(r, ClassBoundResult)
        with pytest.raises(AttributeError):
            r.bound_exact = 2


class TestBatch:
    HEADER = "label,n_K,r1,r2,abs_disc\n"

    def test_mixed_batch(self):
        src = io.StringIO(
            self.HEADER
            + "cyclo5,4,0,2,125\n"
            + "real725,4,4,0,725\n"
            + "\n"
            + "badsig,4,3,1,99\n"
            + "notnum,4,4,0,xyz\n"
        )
        rows = list(batch_class_bounds(src))
        assert len(rows) == 4
        assert rows[0].result.bound_exact == 1
        assert rows[1].result.bound_exact == 5
        assert rows[2].result is None and "SignatureError" in rows[2].error
        assert rows[3].result is None and rows[3].error

    def test_header_required(self):
        with pytest.raises(DomainError):
            list(batch_class_bounds(io.StringIO("a,b,c\n1,2,3\n")))

    def test_empty_input_yields_nothing(self):
        assert list(batch_class_bounds(io.StringIO(""))) == []

    def test_fractional_discriminant_parses(self):
        src = io.StringIO(self.HEADER + "unit,4,4,0,1024/9\n")
        (row,) = list(batch_class_bounds(src))
        assert row.result.bound_exact == 1

    def test_wrong_arity_is_row_error(self):
        src = io.StringIO(self.HEADER + "short,4,4\n")
        (row,) = list(batch_class_bounds(src))
        assert row.result is None
        assert "5 columns" in row.error

    def test_csv_output_and_error_count(self):
        src = io.StringIO(self.HEADER + "ok,4,0,2,125\nbad,4,3,1,99\n")
        out = io.StringIO()
        errors = write_batch_csv(batch_class_bounds(src), out)
        assert errors == 1
        lines = out.getvalue().strip().splitlines()
        assert lines[0] == "label,n_K,r1,r2,abs_disc,b_mid,b_rad,bound_exact,bound_formula,error"
        ok_cells = lines[1].split(",")
        assert ok_cells[0] == "ok"
        assert ok_cells[7] == "1"  # bound_exact
        assert lines[2].startswith("bad,")
        assert "SignatureError" in lines[2]

    def test_batch_row_shape(self):
        src = io.StringIO(self.HEADER + "x,4,4,0,725\n")
        (row,) = list(batch_class_bounds(src))
        assert isinstance(row, BatchRow)
        assert row.label == "x"
        assert row.raw == ("4", "4", "0", "725")
