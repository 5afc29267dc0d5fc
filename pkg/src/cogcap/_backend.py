"""Kernel backend selection.

The Monte Carlo kernels exist in two flavours: numba-compiled loops and
vectorised numpy. ``COGCAP_NUMBA=0`` forces the numpy path; the numpy path is
also used when numba cannot be imported.
"""
import os

_flag = os.environ.get("COGCAP_NUMBA", "1").strip().lower()
NUMBA_REQUESTED = _flag not in ("0", "false", "no", "off")

try:
    import numba  # noqa: F401
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        if len(args) == 1 and callable(args[0]) and not kwargs:
            return args[0]
        return lambda f: f


USE_NUMBA = HAVE_NUMBA and NUMBA_REQUESTED
BACKEND = "numba" if USE_NUMBA else "numpy"
