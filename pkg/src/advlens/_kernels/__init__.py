"""Kernel backend selection.

The hot per-pixel kernels exist twice: a numba @njit build and a pure-numpy
build with identical arithmetic. ``ADVLENS_KERNELS`` picks the path:

* unset        -> numba when importable, numpy otherwise
* ``numba``    -> numba, raise if it cannot be imported
* ``numpy``    -> pure numpy

``benchmarks/bench_kernels.py`` times the two paths against each other.
"""

import os

_FLAG = os.environ.get("ADVLENS_KERNELS", "").strip().lower()
if _FLAG not in ("", "numba", "numpy"):
    raise ValueError(
        f"ADVLENS_KERNELS must be 'numba' or 'numpy', got {_FLAG!r}"
    )

if _FLAG == "numpy":
    from . import numpy_impl as _impl

    ACTIVE_BACKEND = "numpy"
else:
    try:
        from . import numba_impl as _impl

        ACTIVE_BACKEND = "numba"
    except ImportError:
        if _FLAG == "numba":
            raise
        from . import numpy_impl as _impl

        ACTIVE_BACKEND = "numpy"

hsv_from_rgb = _impl.hsv_from_rgb
rgb_from_hsv = _impl.rgb_from_hsv
resize_bilinear = _impl.resize_bilinear
blur_separable_reflect = _impl.blur_separable_reflect

__all__ = [
    "ACTIVE_BACKEND",
    "hsv_from_rgb",
    "rgb_from_hsv",
    "resize_bilinear",
    "blur_separable_reflect",
]
