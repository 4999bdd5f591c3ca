"""Pure-numpy reference implementations of the hot pixel kernels.

The numba implementations in ``numba_impl`` mirror these expression for
expression; both paths must produce bit-identical output. Keep accumulation
order and operand order in sync when touching either file.
"""

import numpy as np


def hsv_from_rgb(rgb):
    """Split an (H, W, 3) uint8 image into hue/saturation/value planes.

    Hue is real-valued degrees in [0, 360), saturation a real fraction in
    [0, 1], value the uint8 channel maximum. Gray pixels canonicalize to
    h = 0 so round trips compare as exact equality.
    """
    r = rgb[:, :, 0].astype(np.float64)
    g = rgb[:, :, 1].astype(np.float64)
    b = rgb[:, :, 2].astype(np.float64)
    v = np.maximum(np.maximum(r, g), b)
    mn = np.minimum(np.minimum(r, g), b)
    delta = v - mn

    safe_v = np.where(v > 0.0, v, 1.0)
    s = np.where(v > 0.0, delta / safe_v, 0.0)

    chroma = delta > 0.0
    safe_d = np.where(chroma, delta, 1.0)
    h_r = 60.0 * (((g - b) / safe_d) % 6.0)
    h_g = 60.0 * ((b - r) / safe_d + 2.0)
    h_b = 60.0 * ((r - g) / safe_d + 4.0)
    h = np.where(v == r, h_r, np.where(v == g, h_g, h_b))
    h = np.where(chroma, h, 0.0)
    h = np.where(h >= 360.0, h - 360.0, h)

    v_u8 = np.maximum(np.maximum(rgb[:, :, 0], rgb[:, :, 1]), rgb[:, :, 2])
    return h, s, v_u8


def rgb_from_hsv(h, s, v):
    """Rebuild an (H, W, 3) uint8 image from hue/saturation/value planes.

    Exact inverse of ``hsv_from_rgb`` for planes it produced, for any
    uint8 value plane (including a remapped one).
    """
    vf = v.astype(np.float64)
    hp = h / 60.0
    c = vf * s
    x = c * (1.0 - np.abs(hp % 2.0 - 1.0))
    m = vf - c
    i = np.minimum(hp.astype(np.int64), 5)

    z = np.zeros_like(c)
    rp = np.choose(i, (c, x, z, z, x, c))
    gp = np.choose(i, (x, c, c, x, z, z))
    bp = np.choose(i, (z, z, x, c, c, x))

    out = np.empty(h.shape + (3,), dtype=np.uint8)
    out[:, :, 0] = np.floor(rp + m + 0.5).astype(np.uint8)
    out[:, :, 1] = np.floor(gp + m + 0.5).astype(np.uint8)
    out[:, :, 2] = np.floor(bp + m + 0.5).astype(np.uint8)
    return out


def resize_bilinear(img, out_w, out_h):
    """Bilinear resize of an (H, W, 3) uint8 image, half-pixel centers.

    Source coordinates follow sx = (dx + 0.5) * in_w / out_w - 0.5, clamped
    to the valid range, so a same-size resize is the exact identity. Output
    levels are rounded half up (all values are non-negative).
    """
    in_h, in_w = img.shape[:2]
    scale_x = in_w / out_w
    scale_y = in_h / out_h

    xs = np.clip((np.arange(out_w, dtype=np.float64) + 0.5) * scale_x - 0.5,
                 0.0, in_w - 1.0)
    ys = np.clip((np.arange(out_h, dtype=np.float64) + 0.5) * scale_y - 0.5,
                 0.0, in_h - 1.0)
    x0 = xs.astype(np.int64)
    y0 = ys.astype(np.int64)
    x1 = np.minimum(x0 + 1, in_w - 1)
    y1 = np.minimum(y0 + 1, in_h - 1)
    fx = (xs - x0)[None, :, None]
    fy = (ys - y0)[:, None, None]

    p = img.astype(np.float64)
    v00 = p[y0[:, None], x0[None, :]]
    v01 = p[y0[:, None], x1[None, :]]
    v10 = p[y1[:, None], x0[None, :]]
    v11 = p[y1[:, None], x1[None, :]]

    top = v00 * (1.0 - fx) + v01 * fx
    bot = v10 * (1.0 - fx) + v11 * fx
    val = top * (1.0 - fy) + bot * fy
    return np.floor(val + 0.5).astype(np.uint8)


def _conv_rows_reflect(plane, kernel):
    # One pass along axis 1; reflect padding mirrors without repeating the
    # edge sample and keeps bouncing when the pad exceeds the width.
    w = plane.shape[1]
    r = kernel.size // 2
    padded = np.pad(plane, ((0, 0), (r, r)), mode="reflect")
    out = np.zeros(plane.shape, dtype=np.float64)
    for j in range(kernel.size):
        out += kernel[j] * padded[:, j:j + w]
    return out


def blur_separable_reflect(plane, kernel):
    """Separable convolution of a float64 plane: rows first, then columns."""
    tmp = _conv_rows_reflect(plane, kernel)
    return _conv_rows_reflect(tmp.T, kernel).T
