"""Backend selection for the U-scan kernel.

The compiled extension is used when it imported and the 64-bit bound holds;
otherwise the pure-Python twin runs with unbounded integers.  Set
POWERORBITS_PURE_PYTHON=1 to force the fallback.
"""
import os

from . import _kernels_py

try:
    if os.environ.get("POWERORBITS_PURE_PYTHON"):
        raise ImportError("pure Python requested")
    from . import _kernels as _compiled
except ImportError:
    _compiled = None

BACKEND = "cython" if _compiled is not None else "python"

_INT64_SAFE = 1 << 62


def fits_int64(coeffs, L, B) -> bool:
    d = len(coeffs) - 1
    big = max(sum(abs(c) for c in coeffs), L) * B**d
    return big < _INT64_SAFE


def scan_u_chunk(coeffs, L, s_primes, q_lo, q_hi, B, backend=None):
    backend = backend or BACKEND
    coeffs, s_primes = list(coeffs), list(s_primes)
    if backend == "cython" and _compiled is not None and fits_int64(coeffs, L, B):
        return _compiled.scan_u_chunk(coeffs, L, s_primes, q_lo, q_hi, B)
    return _kernels_py.scan_u_chunk(coeffs, L, s_primes, q_lo, q_hi, B)
