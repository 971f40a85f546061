"""Timing comparison of the compiled kernel extension vs the NumPy
fallback on the three hot paths: block sieving, the exact hyperbola
identity, and the envelope scan.

Run as:  python benchmarks/bench_kernels.py [--size N] [--repeat R]

Both backends are imported directly (bypassing the import-time selector),
so one process times both.  If the compiled extension is unavailable the
script still reports fallback numbers.
"""

from __future__ import annotations

import argparse
import math
import time

import numpy as np

from divisum.formulas import theorem_specs
from divisum.kernels import _numpy_backend as fallback
from divisum.kernels.tables import primes_upto

try:
    from divisum.kernels import _speedups as compiled
except ImportError:
    compiled = None


def best_of(fn, repeat: int) -> float:
    best = math.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def scan_inputs(size: int):
    """Shared inputs for the envelope-scan benchmark (d4 FULL config)."""
    spec = theorem_specs()["d4-full"]
    primes = primes_upto(math.isqrt(size))
    vals = fallback.d4_block(1, size + 1, primes)
    # the scan over eval points [2, size+1) wants S(1) .. S(size)
    sums_ext = np.cumsum(vals).astype(np.int64)
    cpoly = tuple(c.mid for c in spec.main_term)
    coef = np.array([float(c) for c, _, _ in spec.envelope])
    xpow = np.array([float(p) for _, p, _ in spec.envelope])
    lpow = np.array([int(q) for _, _, q in spec.envelope], dtype=np.int64)
    return sums_ext, cpoly, coef, xpow, lpow


def run(size: int, repeat: int) -> None:
    primes = primes_upto(math.isqrt(size))
    sums_ext, cpoly, coef, xpow, lpow = scan_inputs(size)

    def scan(impl):
        impl.scan_envelope_block(
            sums_ext, 2, size + 1, size, 3, 1, 1, *cpoly,
            coef, xpow, lpow, 1e-6, 1e-12,
        )

    cases = [
        ("d4 sieve block", lambda impl: impl.d4_block(1, size + 1, primes)),
        ("divisor-sum identity", lambda impl: impl.summatory_d_floor(size * 1000)),
        ("envelope scan", scan),
    ]

    print(f"size {size:,}, best of {repeat}")
    header = f"{'kernel':<24}{'fallback':>12}"
    if compiled is not None:
        header += f"{'compiled':>12}{'speedup':>10}"
    print(header)
    for name, body in cases:
        t_fb = best_of(lambda: body(fallback), repeat)
        line = f"{name:<24}{t_fb:>11.4f}s"
        if compiled is not None:
            t_c = best_of(lambda: body(compiled), repeat)
            line += f"{t_c:>11.4f}s{t_fb / t_c:>9.1f}x"
        print(line)
    if compiled is None:
        print("(compiled extension not built; fallback only)")


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--size", type=int, default=10**6,
                    help="scan/sieve ceiling (default 1e6)")
    ap.add_argument("--repeat", type=int, default=3,
                    help="take the best of this many runs (default 3)")
    run(**vars(ap.parse_args()))


if __name__ == "__main__":
    main()
