"""Backend selection for the hot loops.

Set ``AEKERNELS_DISABLE_NUMBA=1`` before import to force the pure-numpy path.
"""
import os

_DISABLED = os.environ.get("AEKERNELS_DISABLE_NUMBA", "").strip().lower() in {"1", "true", "yes"}

try:
    if _DISABLED:
        raise ImportError("numba disabled by AEKERNELS_DISABLE_NUMBA")
    from numba import njit

    HAVE_NUMBA = True
except ImportError:
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        if len(args) == 1 and callable(args[0]) and not kwargs:
            return args[0]
        return lambda f: f


BACKEND = "numba" if HAVE_NUMBA else "numpy"
