"""The two enhancement algorithms under study.

Histogram Equalization (HE) runs on the value channel of an HSV
decomposition, so brightness is stretched while hue and saturation pass
through untouched. Single-Scale Retinex (SSR) subtracts a Gaussian-blurred
illumination estimate in the log domain, per RGB channel, then stretches the
result back to the full level range.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from . import _kernels
from .errors import EmptyInputError, InvalidParameterError
from .image import (
    Histogram256,
    channel_histogram,
    ensure_image_u8,
    hsv_planes_to_rgb_image,
    rgb_image_to_hsv_planes,
)


class EnhanceKind(str, Enum):
    NONE = "none"
    HE = "he"
    RX = "rx"


@dataclass(frozen=True)
class SsrConfig:
    """Retinex configuration; sigma is the Gaussian surround scale in pixels."""

    sigma: float = 100.0

    def __post_init__(self):
        if not self.sigma > 0:
            raise InvalidParameterError(f"sigma must be positive, got {self.sigma}")


# ---------------------------------------------------------------------------
# Histogram equalization
# ---------------------------------------------------------------------------

def build_equalization_lut(hist: Histogram256) -> np.ndarray:
    """Equalization lookup table from a value-channel histogram.

    Classical cdf_min normalization: with cdf(i) the cumulative count and
    cdf_min the cdf at the lowest occupied level,

        lut[i] = round((cdf(i) - cdf_min) / (total - cdf_min) * 255)

    rounding half away from zero. A histogram with a single occupied level
    has no contrast to stretch and yields the identity table. The table is
    monotone non-decreasing with entries in [0, 255].
    """
    if hist.total <= 0:
        raise EmptyInputError("cannot equalize an empty histogram")
    cdf = hist.cumulative()
    occupied = np.nonzero(hist.bins)[0]
    cdf_min = int(cdf[occupied[0]])
    if hist.total == cdf_min:
        return np.arange(256, dtype=np.uint8)
    scaled = (cdf - cdf_min).astype(np.float64) * 255.0 / float(hist.total - cdf_min)
    lut = np.floor(scaled + 0.5)
    # Levels below the lowest occupied one scale negative; they are never
    # looked up for this image, clamp them so the table stays in range.
    return np.clip(lut, 0.0, 255.0).astype(np.uint8)


def enhance_he(img: np.ndarray) -> np.ndarray:
    """Histogram-equalize the HSV value channel of an image.

    Hue and saturation planes are computed once and fed unchanged into the
    reconstruction, so chroma is never perturbed by the brightness remap.
    A constant image is a fixed point.
    """
    ensure_image_u8(img)
    h, s, v = rgb_image_to_hsv_planes(img)
    lut = build_equalization_lut(channel_histogram(v))
    return hsv_planes_to_rgb_image(h, s, lut[v])


# ---------------------------------------------------------------------------
# Single-scale retinex
# ---------------------------------------------------------------------------

def gaussian_kernel(sigma: float) -> np.ndarray:
    """Normalized 1-D Gaussian taps with radius ceil(3*sigma)."""
    if not sigma > 0:
        raise InvalidParameterError(f"sigma must be positive, got {sigma}")
    radius = int(math.ceil(3.0 * sigma))
    offsets = np.arange(-radius, radius + 1, dtype=np.float64)
    weights = np.exp(-(offsets * offsets) / (2.0 * sigma * sigma))
    return weights / weights.sum()


def gaussian_blur(plane: np.ndarray, sigma: float) -> np.ndarray:
    """Separable Gaussian blur of a real-valued plane, reflect-padded borders.

    Reflection mirrors the plane without repeating the edge sample and keeps
    bouncing when the kernel radius exceeds the plane size, which it does for
    sigma=100 on typical inputs; zero padding would darken the illumination
    estimate near borders.
    """
    kernel = gaussian_kernel(sigma)
    arr = np.ascontiguousarray(plane, dtype=np.float64)
    if arr.ndim != 2 or arr.size == 0:
        raise EmptyInputError(f"expected a non-empty 2-D plane, got shape {arr.shape}")
    return _kernels.blur_separable_reflect(arr, kernel)


# Level written to a channel whose reflectance range collapses to a point
# (constant image): the neutral midpoint.
SSR_FLAT_LEVEL = 127


def enhance_ssr(img: np.ndarray, cfg: SsrConfig = SsrConfig()) -> np.ndarray:
    """Single-scale retinex with a Gaussian surround.

    Per channel c the reflectance is ln(I_c + 1) - ln(blur(I_c, sigma) + 1)
    on the original-resolution plane; the reflectance is then stretched
    linearly so its minimum maps to 0 and its maximum to 255. A channel with
    zero reflectance range outputs the flat level 127 everywhere.
    """
    ensure_image_u8(img)
    kernel = gaussian_kernel(cfg.sigma)
    out = np.empty_like(img)
    for c in range(3):
        plane = img[:, :, c].astype(np.float64)
        surround = _kernels.blur_separable_reflect(np.ascontiguousarray(plane), kernel)
        reflectance = np.log(plane + 1.0) - np.log(surround + 1.0)
        lo = reflectance.min()
        hi = reflectance.max()
        if hi > lo:
            stretched = (reflectance - lo) * 255.0 / (hi - lo)
            out[:, :, c] = np.floor(stretched + 0.5).astype(np.uint8)
        else:
            out[:, :, c] = SSR_FLAT_LEVEL
    return out


def apply_enhancement(
    img: np.ndarray, kind: EnhanceKind | str, cfg: SsrConfig = SsrConfig()
) -> np.ndarray:
    """Dispatch to no-op, HE, or SSR."""
    kind = EnhanceKind(kind)
    if kind is EnhanceKind.NONE:
        ensure_image_u8(img)
        return img.copy()
    if kind is EnhanceKind.HE:
        return enhance_he(img)
    return enhance_ssr(img, cfg)
