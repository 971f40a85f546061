"""Tabulation of the arithmetic functions d, d4, d^2, h, and smallest prime
factor over contiguous segments, plus the flat binary dump format."""

from __future__ import annotations

import enum
import math
import struct
from dataclasses import dataclass
from typing import BinaryIO

import numpy as np

from divisum.errors import CapacityError
from divisum.kernels._select import impl

__all__ = [
    "DEFAULT_SEGMENT_SIZE",
    "ArithmeticTable",
    "Kind",
    "mobius_upto",
    "primes_upto",
    "sieve_spf",
    "tabulate",
    "dump_table",
    "load_table",
]

DEFAULT_SEGMENT_SIZE = 2**22


class Kind(enum.Enum):
    D = 1
    D4 = 2
    DSQ = 3
    H = 4
    SPF = 5


@dataclass(frozen=True)
class ArithmeticTable:
    """Values of one arithmetic function on [lo, hi), indexed by n - lo."""

    lo: int
    hi: int
    kind: Kind
    values: np.ndarray  # int64, length hi - lo

    def __post_init__(self):
        if not (1 <= self.lo < self.hi):
            raise ValueError(f"bad segment [{self.lo}, {self.hi})")
        if len(self.values) != self.hi - self.lo:
            raise ValueError("values length does not match segment")

    def __getitem__(self, n: int) -> int:
        if not (self.lo <= n < self.hi):
            raise IndexError(f"{n} outside [{self.lo}, {self.hi})")
        return int(self.values[n - self.lo])


def primes_upto(n: int) -> np.ndarray:
    """All primes <= n, ascending (classic sieve; n is always small here:
    only primes up to isqrt(scan ceiling) are ever needed)."""
    if n < 2:
        return np.empty(0, dtype=np.int64)
    mask = np.ones(n + 1, dtype=bool)
    mask[:2] = False
    for p in range(2, math.isqrt(n) + 1):
        if mask[p]:
            mask[p * p :: p] = False
    return np.nonzero(mask)[0].astype(np.int64)


def mobius_upto(n: int) -> np.ndarray:
    """mu(k) for k = 0..n (index 0 unused)."""
    mu = np.ones(n + 1, dtype=np.int64)
    if n >= 0:
        mu[0] = 0
    for p in primes_upto(n):
        p = int(p)
        mu[p::p] *= -1
        mu[p * p :: p * p] = 0
    return mu


def _check_span(lo: int, hi: int, segment_limit: int | None) -> None:
    limit = DEFAULT_SEGMENT_SIZE if segment_limit is None else segment_limit
    if hi - lo > limit:
        raise CapacityError(
            f"segment [{lo}, {hi}) exceeds the configured size {limit}; "
            "use streaming for larger ranges"
        )


def sieve_spf(lo: int, hi: int, segment_limit: int | None = None) -> ArithmeticTable:
    """Smallest-prime-factor table on [lo, hi) (1 maps to 1, primes to themselves)."""
    return tabulate(Kind.SPF, lo, hi, segment_limit)


def _block_values(kind: Kind, lo: int, hi: int, primes: np.ndarray) -> np.ndarray:
    """Raw value block for one segment; `primes` must cover isqrt(hi - 1)."""
    if kind is Kind.D4:
        return impl.d4_block(lo, hi, primes)
    if kind in (Kind.D, Kind.DSQ):
        vals = impl.d_block(lo, hi, primes)
        return vals * vals if kind is Kind.DSQ else vals
    if kind is Kind.H:
        # coefficients of 1/zeta(2s): mu(m) at n = m^2, zero elsewhere
        vals = np.zeros(hi - lo, dtype=np.int64)
        m_lo = math.isqrt(max(lo - 1, 0)) + 1
        m_hi = math.isqrt(hi - 1)
        if m_hi >= m_lo:
            mu = mobius_upto(m_hi)
            for m in range(m_lo, m_hi + 1):
                vals[m * m - lo] = mu[m]
        return vals
    if kind is Kind.SPF:
        return impl.spf_block(lo, hi, primes)
    raise ValueError(f"unknown kind {kind!r}")


def tabulate(
    kind: Kind, lo: int, hi: int, segment_limit: int | None = None
) -> ArithmeticTable:
    """Values of the requested function on [lo, hi)."""
    _check_span(lo, hi, segment_limit)
    primes = primes_upto(math.isqrt(hi - 1))
    return ArithmeticTable(lo, hi, kind, _block_values(kind, lo, hi, primes))


# -- flat binary dump ---------------------------------------------------------
#
# Layout: little-endian int64 `lo`, `hi`, `kind tag`, then (hi - lo)
# little-endian int64 values.  Tags follow the Kind enum values.

_HEADER = struct.Struct("<qqq")


def dump_table(table: ArithmeticTable, fh: BinaryIO) -> None:
    fh.write(_HEADER.pack(table.lo, table.hi, table.kind.value))
    fh.write(np.ascontiguousarray(table.values, dtype="<i8").tobytes())


def load_table(fh: BinaryIO) -> ArithmeticTable:
    raw = fh.read(_HEADER.size)
    if len(raw) != _HEADER.size:
        raise ValueError("truncated table header")
    lo, hi, tag = _HEADER.unpack(raw)
    count = hi - lo
    body = fh.read(8 * count)
    if len(body) != 8 * count:
        raise ValueError("truncated table body")
    values = np.frombuffer(body, dtype="<i8").astype(np.int64)
    return ArithmeticTable(lo, hi, Kind(tag), values)
