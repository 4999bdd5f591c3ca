"""Pixel-level foundations: images, HSV conversion, histograms, resize, I/O.

Images are numpy arrays of shape (height, width, 3), dtype uint8, channels
ordered R, G, B. All operations are pure; nothing mutates its input.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from PIL import Image

from . import _kernels
from .errors import EmptyInputError, InvalidDimensionError

IMAGE_SUFFIXES = (".png", ".jpg", ".jpeg")


def ensure_image_u8(img: np.ndarray) -> np.ndarray:
    """Validate an (H, W, 3) uint8 image array and return it unchanged."""
    if not isinstance(img, np.ndarray):
        raise InvalidDimensionError(f"expected ndarray image, got {type(img).__name__}")
    if img.ndim != 3 or img.shape[2] != 3:
        raise InvalidDimensionError(f"expected (H, W, 3) image, got shape {img.shape}")
    if img.dtype != np.uint8:
        raise InvalidDimensionError(f"expected uint8 image, got dtype {img.dtype}")
    if img.shape[0] < 1 or img.shape[1] < 1:
        raise InvalidDimensionError(f"image dimensions must be >= 1, got shape {img.shape}")
    return img


# ---------------------------------------------------------------------------
# HSV conversion
#
# Hue is kept as real-valued degrees and saturation as a real fraction so a
# value-channel edit cannot disturb chroma. Gray pixels canonicalize to h=0,
# which makes the RGB -> HSV -> RGB round trip testable as exact equality.
# ---------------------------------------------------------------------------

def rgb_to_hsv(rgb: tuple[int, int, int]) -> tuple[float, float, int]:
    """Convert one RGB triple of levels to (h degrees, s fraction, v level)."""
    r, g, b = (float(c) for c in rgb)
    v = max(r, g, b)
    mn = min(r, g, b)
    delta = v - mn
    s = delta / v if v > 0.0 else 0.0
    if delta > 0.0:
        if v == r:
            h = 60.0 * (((g - b) / delta) % 6.0)
        elif v == g:
            h = 60.0 * ((b - r) / delta + 2.0)
        else:
            h = 60.0 * ((r - g) / delta + 4.0)
        if h >= 360.0:
            h -= 360.0
    else:
        h = 0.0
    return h, s, int(v)


def hsv_to_rgb(hsv: tuple[float, float, int]) -> tuple[int, int, int]:
    """Convert (h, s, v) back to an RGB triple of levels.

    Exact inverse of :func:`rgb_to_hsv` for any triple it produced; for other
    inputs (e.g. a remapped v) channels round to the nearest level.
    """
    h, s, v = hsv
    vf = float(v)
    hp = h / 60.0
    c = vf * s
    x = c * (1.0 - abs(hp % 2.0 - 1.0))
    m = vf - c
    i = min(int(hp), 5)
    if i == 0:
        rp, gp, bp = c, x, 0.0
    elif i == 1:
        rp, gp, bp = x, c, 0.0
    elif i == 2:
        rp, gp, bp = 0.0, c, x
    elif i == 3:
        rp, gp, bp = 0.0, x, c
    elif i == 4:
        rp, gp, bp = x, 0.0, c
    else:
        rp, gp, bp = c, 0.0, x
    return (
        int(math.floor(rp + m + 0.5)),
        int(math.floor(gp + m + 0.5)),
        int(math.floor(bp + m + 0.5)),
    )


def rgb_image_to_hsv_planes(img: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Whole-image HSV decomposition: (h float64, s float64, v uint8) planes."""
    ensure_image_u8(img)
    return _kernels.hsv_from_rgb(img)


def hsv_planes_to_rgb_image(h: np.ndarray, s: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Rebuild an image from HSV planes produced by rgb_image_to_hsv_planes."""
    if h.shape != s.shape or h.shape != v.shape:
        raise InvalidDimensionError(
            f"HSV planes must share a shape, got {h.shape}, {s.shape}, {v.shape}"
        )
    return _kernels.rgb_from_hsv(
        np.ascontiguousarray(h, dtype=np.float64),
        np.ascontiguousarray(s, dtype=np.float64),
        np.ascontiguousarray(v, dtype=np.uint8),
    )


# ---------------------------------------------------------------------------
# Histograms
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Histogram256:
    """256-bin level counts; ``total`` is the number of counted samples."""

    bins: np.ndarray
    total: int

    def cumulative(self) -> np.ndarray:
        """Non-decreasing cumulative counts; cumulative[255] == total."""
        return np.cumsum(self.bins)


def channel_histogram(values) -> Histogram256:
    """Count level occurrences of a sequence (or array) of levels 0..255."""
    arr = np.asarray(values).reshape(-1)
    if arr.size == 0:
        raise EmptyInputError("cannot histogram an empty sequence")
    if arr.dtype != np.uint8:
        arr = arr.astype(np.int64)
        if arr.min() < 0 or arr.max() > 255:
            raise ValueError("levels must lie in [0, 255]")
    bins = np.bincount(arr.reshape(-1), minlength=256).astype(np.int64)
    return Histogram256(bins=bins, total=int(arr.size))


# ---------------------------------------------------------------------------
# Resize
# ---------------------------------------------------------------------------

def resize_bilinear(img: np.ndarray, out_w: int, out_h: int) -> np.ndarray:
    """Resize with bilinear interpolation and half-pixel-centered sampling.

    Output levels are convex combinations of input levels, so they never
    leave [input min, input max]; a same-size resize is the exact identity.
    """
    ensure_image_u8(img)
    if out_w < 1 or out_h < 1:
        raise InvalidDimensionError(f"target dimensions must be >= 1, got {out_w}x{out_h}")
    return _kernels.resize_bilinear(np.ascontiguousarray(img), out_w, out_h)


# ---------------------------------------------------------------------------
# File I/O. JPEG is accepted on the way in; everything we write is PNG so
# intermediate artifacts stay bit-exact.
# ---------------------------------------------------------------------------

def load_image(path: str | Path) -> np.ndarray:
    """Decode a PNG or JPEG file to an (H, W, 3) uint8 array."""
    with Image.open(path) as im:
        arr = np.asarray(im.convert("RGB"), dtype=np.uint8)
    return ensure_image_u8(arr)


def save_png(img: np.ndarray, path: str | Path) -> None:
    """Encode an image losslessly as PNG, creating parent directories."""
    ensure_image_u8(img)
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    Image.fromarray(img, "RGB").save(path, format="PNG")


def encode_png_bytes(img: np.ndarray) -> bytes:
    """Encode an image losslessly as PNG into memory."""
    import io

    ensure_image_u8(img)
    buf = io.BytesIO()
    Image.fromarray(img, "RGB").save(buf, format="PNG")
    return buf.getvalue()


def decode_png_bytes(data: bytes) -> np.ndarray:
    """Decode in-memory PNG (or JPEG) bytes to an (H, W, 3) uint8 array."""
    import io

    with Image.open(io.BytesIO(data)) as im:
        arr = np.asarray(im.convert("RGB"), dtype=np.uint8)
    return ensure_image_u8(arr)
