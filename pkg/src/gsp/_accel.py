"""numba switch.

Set ``GSP_DISABLE_NUMBA=1`` to run the pure-numpy kernels instead of the
compiled loops.  Results agree to rounding either way.
"""
import os

_DISABLED = os.environ.get("GSP_DISABLE_NUMBA", "").strip().lower() in {"1", "true", "yes", "on"}

try:
    if _DISABLED:
        raise ImportError
    from numba import njit as _njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - depends on environment
    _njit = None
    HAVE_NUMBA = False

USE_NUMBA = HAVE_NUMBA and not _DISABLED


def jit(func):
    """``numba.njit(cache=True)`` when available, identity otherwise."""
    if _njit is None:
        return func
    return _njit(cache=True)(func)
