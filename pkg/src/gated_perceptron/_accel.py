"""Backend selection for the hot loops.

Numba is used when importable unless ``GATED_PERCEPTRON_DISABLE_NUMBA`` is set
to a truthy value, in which case every kernel falls back to its numpy path.
"""

import os

_FLAG = "GATED_PERCEPTRON_DISABLE_NUMBA"


def _env_disabled():
    return os.environ.get(_FLAG, "").strip().lower() in {"1", "true", "yes", "on"}


try:
    from numba import njit as _njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    _njit = None
    HAVE_NUMBA = False

USE_NUMBA = HAVE_NUMBA and not _env_disabled()


def njit(fn):
    """Compile ``fn`` with numba when available, otherwise return it unchanged.

    The compiled function is returned even when the env flag disables numba,
    so tests can compare both paths inside one process.
    """
    if not HAVE_NUMBA:
        return fn
    return _njit(cache=True, nogil=True)(fn)


def backend_name():
    return "numba" if USE_NUMBA else "numpy"
