"""Hot loops, with a numba backend and a pure-numpy fallback.

Set ``PRIMECURVES_DISABLE_NUMBA=1`` to force the numpy backend. Both backends
expose the same functions and use the same floating-point formulas, so box
counts and diameters agree exactly; series values agree to rounding (the
summation order differs).
"""

from __future__ import annotations

import os

from . import numpy_backend

_FALSEY = {"", "0", "false", "no", "off"}

if os.environ.get("PRIMECURVES_DISABLE_NUMBA", "").strip().lower() not in _FALSEY:
    _impl = numpy_backend
else:
    try:
        from . import numba_backend as _impl
    except ImportError:  # numba missing or broken
        _impl = numpy_backend

BACKEND: str = _impl.NAME

eval_series = _impl.eval_series
count_point_cells = _impl.count_point_cells
count_segment_cells = _impl.count_segment_cells
hull_chain = _impl.hull_chain
max_sq_distance_convex = _impl.max_sq_distance_convex

__all__ = [
    "BACKEND",
    "eval_series",
    "count_point_cells",
    "count_segment_cells",
    "hull_chain",
    "max_sq_distance_convex",
]
