"""Numba-compiled versions of the hot pixel kernels.

Every function mirrors its twin in ``numpy_impl`` expression for expression
(same operand order, same accumulation order) so the two paths stay
bit-identical. ``tests/test_kernels.py`` enforces this.
"""

import numpy as np
from numba import njit


@njit(cache=True)
def hsv_from_rgb(rgb):
    height, width = rgb.shape[:2]
    h = np.empty((height, width), dtype=np.float64)
    s = np.empty((height, width), dtype=np.float64)
    v_u8 = np.empty((height, width), dtype=np.uint8)
    for y in range(height):
        for x in range(width):
            r = np.float64(rgb[y, x, 0])
            g = np.float64(rgb[y, x, 1])
            b = np.float64(rgb[y, x, 2])
            v = max(r, g, b)
            mn = min(r, g, b)
            delta = v - mn
            if v > 0.0:
                sv = delta / v
            else:
                sv = 0.0
            if delta > 0.0:
                if v == r:
                    hv = 60.0 * (((g - b) / delta) % 6.0)
                elif v == g:
                    hv = 60.0 * ((b - r) / delta + 2.0)
                else:
                    hv = 60.0 * ((r - g) / delta + 4.0)
                if hv >= 360.0:
                    hv = hv - 360.0
            else:
                hv = 0.0
            h[y, x] = hv
            s[y, x] = sv
            v_u8[y, x] = np.uint8(v)
    return h, s, v_u8


@njit(cache=True)
def rgb_from_hsv(h, s, v):
    height, width = h.shape
    out = np.empty((height, width, 3), dtype=np.uint8)
    for y in range(height):
        for x in range(width):
            vf = np.float64(v[y, x])
            hp = h[y, x] / 60.0
            c = vf * s[y, x]
            xx = c * (1.0 - abs(hp % 2.0 - 1.0))
            m = vf - c
            i = min(np.int64(hp), 5)
            if i == 0:
                rp, gp, bp = c, xx, 0.0
            elif i == 1:
                rp, gp, bp = xx, c, 0.0
            elif i == 2:
                rp, gp, bp = 0.0, c, xx
            elif i == 3:
                rp, gp, bp = 0.0, xx, c
            elif i == 4:
                rp, gp, bp = xx, 0.0, c
            else:
                rp, gp, bp = c, 0.0, xx
            out[y, x, 0] = np.uint8(np.floor(rp + m + 0.5))
            out[y, x, 1] = np.uint8(np.floor(gp + m + 0.5))
            out[y, x, 2] = np.uint8(np.floor(bp + m + 0.5))
    return out


@njit(cache=True)
def resize_bilinear(img, out_w, out_h):
    in_h, in_w = img.shape[:2]
    scale_x = in_w / out_w
    scale_y = in_h / out_h
    out = np.empty((out_h, out_w, 3), dtype=np.uint8)
    for y in range(out_h):
        sy = (y + 0.5) * scale_y - 0.5
        if sy < 0.0:
            sy = 0.0
        if sy > in_h - 1.0:
            sy = in_h - 1.0
        y0 = np.int64(sy)
        y1 = min(y0 + 1, in_h - 1)
        fy = sy - y0
        for x in range(out_w):
            sx = (x + 0.5) * scale_x - 0.5
            if sx < 0.0:
                sx = 0.0
            if sx > in_w - 1.0:
                sx = in_w - 1.0
            x0 = np.int64(sx)
            x1 = min(x0 + 1, in_w - 1)
            fx = sx - x0
            for ch in range(3):
                v00 = np.float64(img[y0, x0, ch])
                v01 = np.float64(img[y0, x1, ch])
                v10 = np.float64(img[y1, x0, ch])
                v11 = np.float64(img[y1, x1, ch])
                top = v00 * (1.0 - fx) + v01 * fx
                bot = v10 * (1.0 - fx) + v11 * fx
                val = top * (1.0 - fy) + bot * fy
                out[y, x, ch] = np.uint8(np.floor(val + 0.5))
    return out


@njit(cache=True, inline="always")
def _reflect_index(i, n):
    # Mirror without repeating the edge sample; keeps bouncing for any
    # offset, matching np.pad(mode="reflect").
    if n == 1:
        return 0
    period = 2 * (n - 1)
    m = i % period
    if m >= n:
        m = period - m
    return m


@njit(cache=True)
def _conv_rows_reflect(plane, kernel, out):
    height, w = plane.shape
    k = kernel.size
    r = k // 2
    padded = np.empty(w + 2 * r, dtype=np.float64)
    for y in range(height):
        for i in range(w + 2 * r):
            padded[i] = plane[y, _reflect_index(i - r, w)]
        for x in range(w):
            acc = 0.0
            for j in range(k):
                acc += kernel[j] * padded[x + j]
            out[y, x] = acc
    return out


@njit(cache=True)
def blur_separable_reflect(plane, kernel):
    tmp = np.empty_like(plane)
    _conv_rows_reflect(plane, kernel, tmp)
    out_t = np.empty((plane.shape[1], plane.shape[0]), dtype=np.float64)
    _conv_rows_reflect(np.ascontiguousarray(tmp.T), kernel, out_t)
    return np.ascontiguousarray(out_t.T)
