"""Sieving and summation kernels.

A compiled extension provides the hot loops when available; a NumPy
implementation with identical semantics is substituted otherwise (or when
DIVISUM_FORCE_FALLBACK is set).  `BACKEND` names the one in use.
"""

from divisum.kernels._select import BACKEND, impl as _impl

d_block = _impl.d_block
d4_block = _impl.d4_block
spf_block = _impl.spf_block
summatory_d_floor = _impl.summatory_d_floor
scan_envelope_block = _impl.scan_envelope_block
scan_weighted_block = _impl.scan_weighted_block

from divisum.kernels.tables import (  # noqa: E402
    DEFAULT_SEGMENT_SIZE,
    ArithmeticTable,
    Kind,
    dump_table,
    load_table,
    mobius_upto,
    primes_upto,
    sieve_spf,
    tabulate,
)
from divisum.kernels.summatory import (  # noqa: E402
    SummatoryPoint,
    stream_summatory,
    summatory_d_exact,
    summatory_d4_exact,
    summatory_dsq_exact,
)

__all__ = [
    "BACKEND",
    "DEFAULT_SEGMENT_SIZE",
    "ArithmeticTable",
    "Kind",
    "SummatoryPoint",
    "d_block",
    "d4_block",
    "dump_table",
    "load_table",
    "mobius_upto",
    "primes_upto",
    "scan_envelope_block",
    "scan_weighted_block",
    "sieve_spf",
    "spf_block",
    "stream_summatory",
    "summatory_d_exact",
    "summatory_d4_exact",
    "summatory_dsq_exact",
    "summatory_d_floor",
    "tabulate",
]
