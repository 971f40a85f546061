"""Exact partial sums of the divisor functions.

The workhorses are the two hyperbola identities

    sum_{n<=x} d(n)  = 2 * sum_{a<=sqrt(x)} floor(x/a) - floor(sqrt(x))^2
    sum_{n<=x} d4(n) = 2 * sum_{a<=sqrt(x)} d(a) * D(x/a) - D(floor(sqrt(x)))^2

(with d4 = d*d the four-fold divisor count and D the first sum), and the
Moebius sieve that turns d4 sums into d^2 sums:

    sum_{n<=x} d(n)^2 = sum_{m^2<=x} mu(m) * sum_{n<=x/m^2} d4(n).

Everything here returns exact integers; accumulation that can exceed the
int64 range is carried in Python ints.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from divisum.errors import SummatoryOverflowError
from divisum.kernels._select import impl
from divisum.kernels.tables import (
    DEFAULT_SEGMENT_SIZE,
    Kind,
    _block_values,
    mobius_upto,
    primes_upto,
)

__all__ = [
    "SummatoryPoint",
    "summatory_d_exact",
    "summatory_d4_exact",
    "summatory_dsq_exact",
    "stream_summatory",
]

# Above this the inner floor sums leave the comfortable int64 range.
_X_CAP = 10**16

_INT64_MAX = 2**63 - 1


@dataclass(frozen=True)
class SummatoryPoint:
    x: int
    value: int
    kind: Kind


def _check_x(x: int) -> int:
    x = int(x)
    if x > _X_CAP:
        raise SummatoryOverflowError(
            f"argument {x} exceeds the supported ceiling {_X_CAP}"
        )
    return x


def _d_value(x: int) -> int:
    if x < 1:
        return 0
    return int(impl.summatory_d_floor(x))


def _d4_value(x: int) -> int:
    if x < 1:
        return 0
    r = math.isqrt(x)
    primes = primes_upto(math.isqrt(r))
    acc = 0
    for lo in range(1, r + 1, DEFAULT_SEGMENT_SIZE):
        hi = min(lo + DEFAULT_SEGMENT_SIZE, r + 1)
        dvals = _block_values(Kind.D, lo, hi, primes)
        # python-int accumulation: the cross terms overflow int64 well
        # before x reaches the ceiling
        acc += sum(
            int(dvals[a - lo]) * _d_value(x // a) for a in range(lo, hi)
        )
    return 2 * acc - _d_value(r) ** 2


def _dsq_value(x: int) -> int:
    if x < 1:
        return 0
    r = math.isqrt(x)
    mu = mobius_upto(r)
    acc = 0
    for m in range(1, r + 1):
        sign = int(mu[m])
        if sign:
            acc += sign * _d4_value(x // (m * m))
    return acc


def summatory_d_exact(x: int) -> SummatoryPoint:
    """sum_{n<=x} d(n), exactly, in O(sqrt(x)) floor evaluations."""
    x = _check_x(x)
    return SummatoryPoint(x, _d_value(x), Kind.D)


def summatory_d4_exact(x: int) -> SummatoryPoint:
    """sum_{n<=x} d4(n), exactly, in O(x^(3/4)) floor-sum work."""
    x = _check_x(x)
    return SummatoryPoint(x, _d4_value(x), Kind.D4)


def summatory_dsq_exact(x: int) -> SummatoryPoint:
    """sum_{n<=x} d(n)^2, exactly, via the Moebius sieve over square moduli."""
    x = _check_x(x)
    return SummatoryPoint(x, _dsq_value(x), Kind.DSQ)


def stream_summatory(
    kind: Kind,
    limit: int,
    visitor: Callable[[int, int], None],
    segment_size: int = DEFAULT_SEGMENT_SIZE,
) -> None:
    """Call visitor(n, running_sum) for n = 1..limit in increasing order.

    Memory stays bounded by one segment regardless of `limit`.  Raises
    SummatoryOverflowError before any segment whose running sums would no
    longer fit in int64.
    """
    limit = _check_x(limit)
    if segment_size < 1:
        raise ValueError("segment_size must be positive")
    primes = primes_upto(math.isqrt(max(limit, 1)))
    carry = 0
    for lo in range(1, limit + 1, segment_size):
        hi = min(lo + segment_size, limit + 1)
        vals = _block_values(kind, lo, hi, primes)
        # per-value magnitudes are tiny, so the int64 segment sum is safe;
        # only the carried total can approach the edge
        seg_total = int(vals.sum())
        if carry + max(seg_total, 0) > _INT64_MAX:
            raise SummatoryOverflowError(
                f"running sum for {kind.name} past n={lo} exceeds int64"
            )
        sums = np.cumsum(vals)
        sums += carry
        n = lo
        for s in sums.tolist():
            visitor(n, s)
            n += 1
        carry += seg_total
