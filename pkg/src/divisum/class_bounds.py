"""Minkowski bounds and class-number caps for small-degree number fields.

The class number h_K of a number field K is at most the number of integral
ideals of norm up to the Minkowski bound

    b = (n_K! / n_K^n_K) * (4/pi)^r2 * sqrt(|d_K|),

and that ideal count is in turn at most sum_{m <= b} d_{n_K}(m).  Only the
quartic divisor sum is implemented here (degree-2/3 sums are out of
scope), so the exact cap is available for n_K = 4; the Minkowski bound
itself is computed for degrees 2 through 4.  For b >= 193 the one-line
cap (1/3) b log^3 b applies as well and is reported alongside; the exact
divisor sum is never worse, so it is always the operative bound.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from fractions import Fraction
from math import factorial, floor, isqrt
from typing import Callable, Iterable, Iterator, TextIO

from divisum.enclosure import DEFAULT_PRECISION, Enclosure, working_precision
from divisum.errors import DomainError, IndeterminateFloorError, SignatureError
from divisum.kernels import summatory_d4_exact

__all__ = [
    "BatchRow",
    "ClassBoundResult",
    "NumberFieldInput",
    "batch_class_bounds",
    "class_bound_exact",
    "class_bound_for_field",
    "class_bound_formula",
    "minkowski_bound",
    "write_batch_csv",
]

_FORMULA_MIN = 193
_ESCALATION_LADDER = (512, 1024, 2048)


@dataclass(frozen=True)
class NumberFieldInput:
    """Signature data of a number field: degree, real embeddings, pairs of
    complex embeddings, and |discriminant|.  abs_disc accepts a Fraction so
    boundary sanity values (not actual discriminants) can be probed."""

    n_K: int
    r1: int
    r2: int
    abs_disc: int | Fraction
    label: str = ""

    def __post_init__(self):
        if self.n_K not in (2, 3, 4):
            raise DomainError(f"degree must be 2, 3 or 4, got {self.n_K}")
        if self.r1 < 0 or self.r2 < 0:
            raise SignatureError("embedding counts must be nonnegative")
        if self.r1 + 2 * self.r2 != self.n_K:
            raise SignatureError(
                f"r1 + 2*r2 = {self.r1 + 2 * self.r2} != degree {self.n_K}"
            )
        if self.abs_disc < 1:
            raise DomainError(f"|discriminant| must be >= 1, got {self.abs_disc}")


@dataclass(frozen=True)
class ClassBoundResult:
    b: Enclosure
    bound_exact: int
    bound_formula: Enclosure | None
    method_note: str


def minkowski_bound(
    field: NumberFieldInput, precision: int = DEFAULT_PRECISION
) -> Enclosure:
    """Enclosure of (n_K!/n_K^n_K) (4/pi)^r2 sqrt(|d|).

    The rational prefactor is exact (3/32 for quartic fields); only the
    power of pi and the square root contribute width."""
    n = field.n_K
    pref = Fraction(factorial(n), n**n) * Fraction(4) ** field.r2
    d = Fraction(field.abs_disc)
    root = _exact_sqrt(d)
    with working_precision(precision):
        if root is not None:
            out = Enclosure(pref * root)
        else:
            out = Enclosure(pref) * Enclosure(d).sqrt()
        if field.r2:
            out = out / Enclosure.pi() ** field.r2
        return out


def _exact_sqrt(q: Fraction) -> Fraction | None:
    """sqrt(q) as an exact rational when q is a perfect rational square."""
    p, d = q.numerator, q.denominator
    rp, rd = isqrt(p), isqrt(d)
    if rp * rp == p and rd * rd == d:
        return Fraction(rp, rd)
    return None


def _floor_of(b: Enclosure) -> int:
    lo = floor(b.lower_exact())
    hi = floor(b.upper_exact())
    if lo != hi:
        raise IndeterminateFloorError(
            f"enclosure [{float(b.lower_exact())}, {float(b.upper_exact())}] "
            "straddles an integer"
        )
    return lo


def class_bound_exact(
    b,
    refine: Callable[[int], Enclosure] | None = None,
) -> int:
    """The ideal-count cap sum_{m <= floor(b)} d4(m), exactly.

    b may be a number or an Enclosure.  If the enclosure straddles an
    integer, `refine` (precision -> tighter enclosure of the same value)
    is consulted at escalating precision; without one, or if the straddle
    survives the ladder, the floor is genuinely undetermined."""
    be = b if isinstance(b, Enclosure) else Enclosure(b)
    if be.lower_exact() < 1:
        raise DomainError("Minkowski bound below 1; no ideals to count")
    try:
        n = _floor_of(be)
    except IndeterminateFloorError:
        if refine is None:
            raise
        n = None
        for prec in _ESCALATION_LADDER:
            try:
                n = _floor_of(refine(prec))
                break
            except IndeterminateFloorError:
                continue
        if n is None:
            raise
    return summatory_d4_exact(n).value


def class_bound_formula(b, precision: int = DEFAULT_PRECISION) -> Enclosure:
    """The closed-form cap (1/3) b log^3 b, valid only from b = 193 on."""
    be = b if isinstance(b, Enclosure) else Enclosure(b)
    if be.lower_exact() < _FORMULA_MIN:
        raise DomainError(f"closed-form cap requires b >= {_FORMULA_MIN}")
    with working_precision(precision):
        L = be.log()
        return be * L * L * L / 3


def class_bound_for_field(
    field: NumberFieldInput, precision: int = DEFAULT_PRECISION
) -> ClassBoundResult:
    """Minkowski bound plus both class-number caps for one field."""
    if field.n_K != 4:
        raise DomainError(
            "only the quartic divisor sum is implemented; need degree 4"
        )
    b = minkowski_bound(field, precision)
    exact = class_bound_exact(b, refine=lambda p: minkowski_bound(field, p))
    if b.lower_exact() >= _FORMULA_MIN:
        formula = class_bound_formula(b, precision)
        note = (
            f"h_K <= {exact} (exact divisor sum; closed form gives "
            f"{formula.mid:.6g} and is never sharper)"
        )
    else:
        formula = None
        note = f"h_K <= {exact} (exact divisor sum; closed form needs b >= 193)"
    return ClassBoundResult(b=b, bound_exact=exact, bound_formula=formula, method_note=note)


# -- batch ingestion ----------------------------------------------------------

_BATCH_HEADER = ["label", "n_K", "r1", "r2", "abs_disc"]
_BATCH_OUT_HEADER = _BATCH_HEADER + ["b_mid", "b_rad", "bound_exact", "bound_formula", "error"]


@dataclass(frozen=True)
class BatchRow:
    """One processed input row; exactly one of result/error is set."""

    label: str
    raw: tuple[str, ...]
    result: ClassBoundResult | None
    error: str | None


def _parse_disc(text: str) -> int | Fraction:
    text = text.strip()
    if "/" in text:
        return Fraction(text)
    return int(text)


def batch_class_bounds(
    source: Iterable[str] | TextIO, precision: int = DEFAULT_PRECISION
) -> Iterator[BatchRow]:
    """Process delimited rows of (label, n_K, r1, r2, abs_disc).

    The header row is required.  Parse or signature failures are carried
    per-row in the output stream; the batch never aborts on bad input."""
    reader = csv.reader(source)
    try:
        header = next(reader)
    except StopIteration:
        return
    if [h.strip() for h in header] != _BATCH_HEADER:
        raise DomainError(
            f"batch header must be {','.join(_BATCH_HEADER)}, got {','.join(header)}"
        )
    for row in reader:
        if not row or all(not cell.strip() for cell in row):
            continue
        label = row[0].strip() if row else ""
        raw = tuple(cell.strip() for cell in row[1:5])
        try:
            if len(row) != 5:
                raise DomainError(f"expected 5 columns, got {len(row)}")
            field = NumberFieldInput(
                n_K=int(row[1]),
                r1=int(row[2]),
                r2=int(row[3]),
                abs_disc=_parse_disc(row[4]),
                label=label,
            )
            yield BatchRow(label, raw, class_bound_for_field(field, precision), None)
        except Exception as exc:  # per-row error channel, batch continues
            yield BatchRow(label, raw, None, f"{type(exc).__name__}: {exc}")


def write_batch_csv(rows: Iterable[BatchRow], fh: TextIO) -> int:
    """Write processed rows in the documented output format; returns the
    number of rows that carried errors."""
    w = csv.writer(fh)
    w.writerow(_BATCH_OUT_HEADER)
    errors = 0
    for r in rows:
        raw = list(r.raw) + [""] * (4 - len(r.raw))
        if r.result is None:
            errors += 1
            w.writerow([r.label, *raw, "", "", "", "", r.error])
        else:
            res = r.result
            formula = "" if res.bound_formula is None else repr(res.bound_formula.mid)
            w.writerow(
                [r.label, *raw, repr(res.b.mid), repr(res.b.rad),
                 res.bound_exact, formula, ""]
            )
    return errors
