"""Backend selection: compiled extension if available, NumPy fallback
otherwise.  ``DIVISUM_FORCE_FALLBACK=1`` forces the fallback (used by the
benchmark and the backend-equivalence tests)."""

from __future__ import annotations

import os

if os.environ.get("DIVISUM_FORCE_FALLBACK", "") not in ("", "0"):
    from divisum.kernels import _numpy_backend as impl
else:
    try:
        from divisum.kernels import _speedups as impl  # type: ignore[no-redef]
    except ImportError:
        from divisum.kernels import _numpy_backend as impl  # type: ignore[no-redef]

BACKEND: str = impl.BACKEND_NAME
