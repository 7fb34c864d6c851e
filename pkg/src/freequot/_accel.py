"""JIT switch for the numeric kernels.

Kernels are written in the numba-compatible subset of Python/numpy.  They are
compiled with ``numba.njit`` unless numba is missing or the environment
variable ``FREEQUOT_DISABLE_NUMBA`` is set to a truthy value, in which case the
plain Python functions are used unchanged.
"""

from __future__ import annotations

import os

_FLAG = os.environ.get("FREEQUOT_DISABLE_NUMBA", "").strip().lower()
NUMBA_DISABLED = _FLAG not in ("", "0", "false", "no")

try:
    import numba as _numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    _numba = None

USING_NUMBA = _numba is not None and not NUMBA_DISABLED


def njit(func):
    """Compile ``func`` with numba when enabled; otherwise return it as is.

    The uncompiled function is always reachable as ``func.py_func`` so tests
    and benchmarks can run both paths side by side.
    """
    if USING_NUMBA:
        return _numba.njit(cache=True)(func)
    func.py_func = func
    return func
