"""Hot numeric kernels with a numba fast path and a pure-numpy fallback.

The jitted path is used by default.  Set ``WAYFARER_DISABLE_NUMBA=1`` to
force the numpy fallback (also used automatically when numba is not
importable).  Both paths implement identical arithmetic; see
``benchmarks/bench_kernels.py`` for a speed comparison.
"""

import os

_flag = os.environ.get("WAYFARER_DISABLE_NUMBA", "").strip()
NUMBA_DISABLED = _flag not in ("", "0")

if NUMBA_DISABLED:
    from . import _numpy as _impl
else:
    try:
        from . import _numba as _impl
    except ImportError:
        from . import _numpy as _impl

BACKEND = _impl.BACKEND
cast_rays = _impl.cast_rays
points_in_polygon = _impl.points_in_polygon
gibbs_sweeps = _impl.gibbs_sweeps

__all__ = ["BACKEND", "NUMBA_DISABLED", "cast_rays", "points_in_polygon", "gibbs_sweeps"]
