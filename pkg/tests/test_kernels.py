"""Cross-path checks: the numba kernels must match pure numpy bit for bit."""

import numpy as np
import pytest

from advlens._kernels import numpy_impl
from advlens.enhance import gaussian_kernel

numba_impl = pytest.importorskip("advlens._kernels.numba_impl")


def test_hsv_paths_identical(rng):
    for _ in range(30):
        img = rng.integers(0, 256, (int(rng.integers(1, 33)), int(rng.integers(1, 33)), 3),
                           dtype=np.uint8)
        h_np, s_np, v_np = numpy_impl.hsv_from_rgb(img)
        h_nb, s_nb, v_nb = numba_impl.hsv_from_rgb(img)
        assert (h_np == h_nb).all()
        assert (s_np == s_nb).all()
        assert (v_np == v_nb).all()
        back_np = numpy_impl.rgb_from_hsv(h_np, s_np, v_np)
        back_nb = numba_impl.rgb_from_hsv(h_np, s_np, v_np)
        assert (back_np == back_nb).all()


def test_hsv_paths_identical_after_value_remap(rng):
    # a remapped value plane is the HE case; paths must still agree
    img = rng.integers(0, 256, (20, 20, 3), dtype=np.uint8)
    h, s, v = numpy_impl.hsv_from_rgb(img)
    lut = rng.permutation(256).astype(np.uint8)
    remapped = lut[v]
    assert (numpy_impl.rgb_from_hsv(h, s, remapped)
            == numba_impl.rgb_from_hsv(h, s, remapped)).all()


def test_resize_paths_identical(rng):
    for _ in range(30):
        img = rng.integers(0, 256, (int(rng.integers(1, 25)), int(rng.integers(1, 25)), 3),
                           dtype=np.uint8)
        out_w = int(rng.integers(1, 40))
        out_h = int(rng.integers(1, 40))
        assert (numpy_impl.resize_bilinear(img, out_w, out_h)
                == numba_impl.resize_bilinear(img, out_w, out_h)).all()


def test_blur_paths_identical(rng):
    for sigma in (0.6, 2.0, 9.5):
        kernel = gaussian_kernel(sigma)
        for _ in range(8):
            plane = rng.random((int(rng.integers(1, 30)), int(rng.integers(1, 30)))) * 255.0
            out_np = numpy_impl.blur_separable_reflect(plane, kernel)
            out_nb = numba_impl.blur_separable_reflect(plane, kernel)
            assert (out_np == out_nb).all()


def test_blur_paths_identical_kernel_wider_than_plane(rng):
    # sigma large enough that reflection has to bounce repeatedly
    kernel = gaussian_kernel(12.0)
    plane = rng.random((6, 5)) * 255.0
    assert (numpy_impl.blur_separable_reflect(plane, kernel)
            == numba_impl.blur_separable_reflect(plane, kernel)).all()


def test_env_flag_selects_numpy():
    import os
    import subprocess
    import sys

    code = "from advlens import _kernels; print(_kernels.ACTIVE_BACKEND)"
    out = subprocess.run(
        [sys.executable, "-c", code],
        capture_output=True, text=True,
        env={**os.environ, "ADVLENS_KERNELS": "numpy"},
    )
    assert out.stdout.strip() == "numpy"
