"""Backend selection for the assignment kernel.

The compiled kernel is used when it imports; ``PVTRACK_PURE_PYTHON=1``
forces the fallback. Both return identical answers.
"""
from __future__ import annotations

import os

from . import _lap

try:
    if os.environ.get("PVTRACK_PURE_PYTHON"):
        raise ImportError("pure-Python kernel requested")
    from . import _lap_ext
except ImportError:
    _lap_ext = None

BACKEND = "cython" if _lap_ext is not None else "python"


def available_backends() -> list[str]:
    return ["python"] + (["cython"] if _lap_ext is not None else [])


def set_backend(name: str) -> str:
    """Switch the active kernel; returns the previous backend name."""
    global BACKEND
    if name not in available_backends():
        raise ValueError(f"backend {name!r} not available")
    previous, BACKEND = BACKEND, name
    return previous


def solve_lap(costs, allowed):
    n, m = costs.shape
    if BACKEND == "cython" and _lap_ext.fits_int64(n, m):
        return _lap_ext.solve_lap(costs, allowed)
    return _lap.solve_lap(costs, allowed)
