"""Benchmark the numba kernels against the pure-numpy fallback.

Run: python benchmarks/bench_kernels.py [--size 512] [--sigma 25] [--repeat 5]

The first numba call per kernel compiles (cached afterwards); a warmup call
is excluded from timing. Both paths must produce bit-identical results,
which this script also asserts.
"""

import argparse
import time

import numpy as np

from advlens._kernels import numba_impl, numpy_impl
from advlens.enhance import gaussian_kernel


def timeit(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--size", type=int, default=512)
    parser.add_argument("--sigma", type=float, default=25.0)
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()

    rng = np.random.default_rng(0)
    img = rng.integers(0, 256, (args.size, args.size, 3), dtype=np.uint8)
    plane = rng.random((args.size, args.size))
    kernel = gaussian_kernel(args.sigma)
    h, s, v = numpy_impl.hsv_from_rgb(img)

    cases = [
        ("hsv_from_rgb", lambda m: lambda: m.hsv_from_rgb(img)),
        ("rgb_from_hsv", lambda m: lambda: m.rgb_from_hsv(h, s, v)),
        ("resize_bilinear 2x", lambda m: lambda: m.resize_bilinear(img, args.size * 2, args.size * 2)),
        (f"gaussian_blur sigma={args.sigma}", lambda m: lambda: m.blur_separable_reflect(plane, kernel)),
    ]

    print(f"image {args.size}x{args.size}, best of {args.repeat}")
    print(f"{'kernel':<28} {'numpy':>10} {'numba':>10} {'speedup':>8}")
    for name, make in cases:
        make(numba_impl)()  # warmup / compile
        t_np, out_np = timeit(make(numpy_impl), args.repeat)
        t_nb, out_nb = timeit(make(numba_impl), args.repeat)
        if isinstance(out_np, tuple):
            match = all((a == b).all() for a, b in zip(out_np, out_nb))
        else:
            match = (out_np == out_nb).all()
        assert match, f"{name}: paths diverged"
        print(f"{name:<28} {t_np * 1e3:>8.2f}ms {t_nb * 1e3:>8.2f}ms {t_np / t_nb:>7.2f}x")


if __name__ == "__main__":
    main()
