"""Numba switch for the hot kernels.

Kernels are written in the numba-compatible subset of Python. They are
compiled with ``numba.njit`` unless the environment variable
``MALAB_DISABLE_NUMBA`` is set to a truthy value (or numba is missing), in
which case the undecorated Python functions are used as-is.
"""

import os

_FALSY = {"", "0", "false", "no", "off"}


def _numba_requested():
    return os.environ.get("MALAB_DISABLE_NUMBA", "").strip().lower() in _FALSY


try:
    import numba as _numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    _numba = None

NUMBA_ENABLED = _numba is not None and _numba_requested()


def jit(func):
    """Compile ``func`` in nopython mode when numba is enabled."""
    if NUMBA_ENABLED:
        return _numba.njit(cache=True)(func)
    return func


def python_version(func):
    """Return the pure-Python body of a (possibly) jitted kernel."""
    return getattr(func, "py_func", func)
