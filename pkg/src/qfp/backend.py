"""Execution backend selection for the hot kernels.

Two interchangeable implementations exist for every Monte Carlo and
brute-force kernel: numba ``@njit`` loops and vectorized pure numpy.
Both consume the same splitmix64 streams and produce bit-identical
results; the numba path is simply faster (see ``benchmarks/``).

The backend is resolved once at import time from the ``QFP_BACKEND``
environment variable:

* ``auto``  (default) - numba when importable, numpy otherwise
* ``numba`` - require numba, fail loudly if it is missing
* ``numpy`` - force the pure-numpy fallback
"""

from __future__ import annotations

import os

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised only without numba
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        """No-op stand-in so kernel modules import cleanly without numba."""
        if args and callable(args[0]):
            return args[0]

        def wrap(fn):
            return fn

        return wrap


_VALID = ("auto", "numba", "numpy")


def _resolve(requested: str) -> str:
    if requested not in _VALID:
        raise ValueError(
            f"unknown backend {requested!r}; expected one of {_VALID}"
        )
    if requested == "numpy":
        return "numpy"
    if requested == "numba":
        if not HAVE_NUMBA:
            raise RuntimeError(
                "QFP_BACKEND=numba was requested but numba is not importable"
            )
        return "numba"
    return "numba" if HAVE_NUMBA else "numpy"


_active = _resolve(os.environ.get("QFP_BACKEND", "auto").strip().lower())


def active() -> str:
    """Name of the backend currently in use ("numba" or "numpy")."""
    return _active


def set_backend(name: str) -> str:
    """Switch backend at runtime (tests and benchmarks); returns the choice."""
    global _active
    _active = _resolve(name)
    return _active
