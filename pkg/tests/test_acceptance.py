"""Acceptance gate: one test (one pass/fail line under pytest -v) per
acceptance criterion.

Two tests in this file fail by design, because the claims they pin are
contradicted by the certified computation itself:

* criterion 4b: the claimed leading digits 0.745/0.824/0.461 for the
  square-divisor cubic coefficients; the enclosures (radius < 1e-25)
  truncate to 0.744/0.823/0.460.
* criterion 6: the remainder bound |sum d(n) - x(log x + 2 gamma - 1)|
  <= 0.397 sqrt(x) claimed violation-free from 5560 on; it fails at the
  left limits of exactly three points: 5760, 6720, 7560.

Both are kept red rather than weakened; the assertion messages carry the
certified counterexamples.
"""

import os
import random
from fractions import Fraction

from divisum import Enclosure
from divisum.class_bounds import (
    NumberFieldInput,
    class_bound_exact,
    class_bound_for_field,
    class_bound_formula,
)
from divisum.kernels import (
    Kind,
    stream_summatory,
    summatory_d4_exact,
    summatory_d_exact,
    summatory_dsq_exact,
)
from divisum.verifier import (
    convolution_identity_check,
    find_threshold,
    verify_delta_alpha,
    verify_envelope,
    verify_s1_constant,
    verify_s2_checkpoints,
)

_WORKERS = min(4, os.cpu_count() or 1)

_EXACT = {
    Kind.D: summatory_d_exact,
    Kind.D4: summatory_d4_exact,
    Kind.DSQ: summatory_dsq_exact,
}


def _geom_points(frm: int, to: int, count: int) -> list[int]:
    ratio = (to / frm) ** (1.0 / (count - 1))
    return sorted({int(round(frm * ratio**i)) for i in range(count)})


def test_criterion_01_d4_envelope_holds_to_1e7_and_extended_ceiling(specs):
    r = verify_envelope(specs["d4-full"], 2, 10**7, workers=_WORKERS)
    assert r.violations == [] and r.violations_overflow == 0, r.to_json()
    assert r.checked == 2 * (10**7 - 1)
    assert r.max_ratio < 1.0
    # extended mode: the scan ceiling used when the bound was first checked
    ceiling = 5560 * 5560
    r_ext = verify_envelope(specs["d4-full"], 10**7 + 1, ceiling, workers=_WORKERS)
    assert r_ext.violations == [] and r_ext.violations_overflow == 0, r_ext.to_json()
    assert r.wall_time + r_ext.wall_time <= 900.0


def test_criterion_02_dsq_envelope_holds_to_1e7(specs):
    r = verify_envelope(specs["dsq-full"], 2, 10**7, workers=_WORKERS)
    assert r.violations == [] and r.violations_overflow == 0, r.to_json()
    assert r.checked == 2 * (10**7 - 1)
    assert r.max_ratio < 1.0


def test_criterion_03_clean_thresholds_recovered_exactly(specs):
    for name, expected in (
        ("d4-clean", 193),
        ("dsq-clean-quarter", 433),
        ("dsq-clean-unit", 7),
    ):
        spec = specs[name]
        res = find_threshold(spec, 10**5, workers=_WORKERS)
        assert res.threshold == expected == spec.threshold, (name, res.to_dict())
        # certain violations strictly below the threshold...
        below = verify_envelope(spec, 2, expected - 1)
        assert len(below.violations) + below.violations_overflow > 0, name
        # ...and none from the threshold up to 1e5
        above = verify_envelope(spec, expected, 10**5, workers=_WORKERS)
        assert above.violations == [] and above.violations_overflow == 0, name


def test_criterion_04a_constants_certified_as_computed(table):
    radius_cap = Fraction(1, 10**25)
    for name in ("C1", "C2", "C3", "C4", "D1", "D2", "D3", "D4", "F1", "Hstar_34"):
        assert getattr(table, name).rad_exact() <= radius_cap, name
    assert table.C2.truncate_decimal(3) == Fraction("0.654")
    assert table.C3.truncate_decimal(3) == Fraction("0.981")
    assert table.C4.truncate_decimal(3) == Fraction("0.272")
    assert table.C1.contains(Fraction(1, 6))
    assert table.D1.intersects(1 / Enclosure.pi() ** 2)
    assert table.F1.certainly_le(Fraction(448, 100))
    assert (table.F1 * table.Hstar_34).certainly_le(Fraction(973, 100))
    assert (Enclosure(1) - table.C4).certainly_le(Fraction(73, 100))


def test_criterion_04b_dsq_cubic_leading_digits_as_claimed(table):
    got = tuple(
        getattr(table, name).truncate_decimal(3) for name in ("D2", "D3", "D4")
    )
    want = (Fraction("0.745"), Fraction("0.824"), Fraction("0.461"))
    assert got == want, (
        "claimed leading digits 0.745/0.824/0.461 for the square-divisor "
        f"cubic, but the certified enclosures (radius < 1e-25) truncate to "
        f"{'/'.join(f'{float(g):.3f}' for g in got)}"
    )


def test_criterion_05_s1_direct_check_to_6e5(table):
    r = verify_s1_constant(6 * 10**5 - 1, table=table)
    assert r.violations == [] and r.violations_overflow == 0, r.to_json()
    assert r.range == (2, 6 * 10**5 - 1)
    assert r.max_ratio < 1.0
    assert r.wall_time <= 120.0


def test_criterion_06_remainder_bound_from_5560_to_1e7():
    r = verify_delta_alpha(5560, 10**7, workers=_WORKERS)
    assert r.violations == [] and r.violations_overflow == 0, (
        "claimed violation-free from 5560 on, but the bound fails at "
        f"{[(v.x, v.side) for v in r.violations]} "
        f"(max ratio {r.max_ratio:.6f} at x = {r.max_ratio_at})"
    )


def test_criterion_07_sieve_vs_identity_and_convolutions():
    rng = random.Random(20260823)
    for kind in (Kind.D, Kind.D4, Kind.DSQ):
        xs = sorted({rng.randint(1, 10**6) for _ in range(1000)})
        want = set(xs)
        streamed: dict[int, int] = {}

        def visitor(n, s):
            if n in want:
                streamed[n] = s

        stream_summatory(kind, max(xs), visitor)
        for x in xs:
            assert _EXACT[kind](x).value == streamed[x], (kind, x)
    conv = convolution_identity_check(10**4)
    assert conv.violations == [] and conv.max_ratio == 0.0, conv.to_json()
    assert conv.checked == 2 * 10**4


def test_criterion_08_s2_closed_form_at_log_spaced_points(table):
    pts = _geom_points(table.x0, 10**7, 100)
    r = verify_s2_checkpoints(pts, table=table)
    assert r.checked == len(pts)
    # empirical finding, surfaced here: the radius held at every checkpoint
    assert r.violations == [], (
        "S2 closed-form radius exceeded at "
        f"{[(v.x, v.ratio) for v in r.violations]}"
    )
    assert r.max_ratio < 1.0
    # cross-check the budgeted accumulator against the enclosure evaluator
    # at the first checkpoint
    from divisum.formulas import S2_approx, S2_exact

    exact = S2_exact(pts[0], table.precision_bits)
    approx = S2_approx(pts[0], table)
    band = (approx.main - approx.radius).hull(approx.main + approx.radius)
    assert band.contains(exact) or band.intersects(exact)


def test_criterion_09_class_number_caps():
    r125 = class_bound_for_field(NumberFieldInput(4, 0, 2, 125))
    assert r125.bound_exact == 1
    r725 = class_bound_for_field(NumberFieldInput(4, 4, 0, 725))
    assert r725.bound_exact == 5
    b = 10**4
    assert class_bound_exact(b) <= class_bound_formula(b).upper_exact()


def test_criterion_10_reports_byte_identical_across_workers(specs):
    serial = verify_envelope(specs["d4-full"], 2, 10**7, workers=1)
    parallel = verify_envelope(specs["d4-full"], 2, 10**7, workers=_WORKERS)
    assert serial.canonical_bytes() == parallel.canonical_bytes()
