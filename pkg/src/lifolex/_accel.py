"""Backend switch for the hot kernels.

Kernels are written once as plain Python over numpy arrays.  When numba is
importable they are compiled with ``@njit``; setting ``LIFOLEX_BACKEND=numpy``
(or having no numba) keeps them as ordinary functions and swaps the bit
comparison primitive for a vectorised numpy version.
"""
import os

BACKEND_ENV = "LIFOLEX_BACKEND"

_requested = os.environ.get(BACKEND_ENV, "numba").strip().lower()
if _requested not in ("numba", "numpy"):
    raise ImportError(f"{BACKEND_ENV} must be 'numba' or 'numpy', got {_requested!r}")

HAS_NUMBA = False
if _requested == "numba":
    try:
        from numba import njit as _njit

        HAS_NUMBA = True
    except ImportError:  # pragma: no cover - depends on environment
        HAS_NUMBA = False

BACKEND = "numba" if HAS_NUMBA else "numpy"


def jit(fn):
    """Compile ``fn`` with numba when the numba backend is active."""
    if HAS_NUMBA:
        return _njit(cache=True, nogil=True)(fn)
    return fn
