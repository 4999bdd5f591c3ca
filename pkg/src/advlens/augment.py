"""Adverse-condition simulations applied per pixel to whole images.

Four augments model conditions a vehicle camera can meet in the field, plus
an identity augment used as the ablation arm:

* dark        y = floor(x / 8)
* overexpose  y = min(255, 2x)
* fog         lift every subpixel by 2550, rescale the image max to 255
* dark-rainy  invert, lift, normalize, invert back; pixels whose original
              triple has any subpixel >= 192 keep their original value

The two normalizing augments run in real arithmetic and quantize once at the
end, rounding half away from zero.
"""

from __future__ import annotations

from enum import Enum

import numpy as np

from .errors import EmptyInputError
from .image import ensure_image_u8

# Per-pixel retention threshold of the dark-rainy augment: 255 * 0.75 on
# integer levels means "subpixel >= 192".
RAIN_KEEP_LEVEL = 192


class AugmentKind(str, Enum):
    IDENTITY = "identity"
    DARK = "dark"
    OVEREXPOSE = "overexpose"
    FOG = "fog"
    DARK_RAINY = "dark-rainy"


def image_max(values: np.ndarray) -> float:
    """Maximum over every subpixel of an image (one scalar, not per channel)."""
    arr = np.asarray(values)
    if arr.size == 0:
        raise EmptyInputError("image_max of an empty image")
    return float(arr.max())


def _quantize(values: np.ndarray) -> np.ndarray:
    # Round half away from zero on the non-negative [0, 255] domain.
    return np.floor(values + 0.5).astype(np.uint8)


def augment_identity(img: np.ndarray) -> np.ndarray:
    """Ablation arm: bit-identical copy."""
    ensure_image_u8(img)
    return img.copy()


def augment_dark(img: np.ndarray) -> np.ndarray:
    """Night driving: every subpixel floor-divided by 8; output in [0, 31]."""
    ensure_image_u8(img)
    return img // 8


def augment_overexpose(img: np.ndarray) -> np.ndarray:
    """Sun glare: subpixels doubled and clipped at 255."""
    ensure_image_u8(img)
    doubled = img.astype(np.int64) * 2
    return np.minimum(doubled, 255).astype(np.uint8)


def augment_fog(img: np.ndarray) -> np.ndarray:
    """Haze: lift all subpixels by 2550, then rescale so the image max is 255.

    Contrast collapses into the bright end; any image containing a 255
    subpixel ends up entirely in [232, 255].
    """
    ensure_image_u8(img)
    lifted = img.astype(np.float64) + 2550.0
    peak = image_max(lifted)
    return _quantize(lifted * 255.0 / peak)


def augment_dark_rainy(img: np.ndarray) -> np.ndarray:
    """Wet night: darken via inverted fog, keeping bright pixels unchanged.

    Per subpixel: invert and lift (765 - x), normalize by the image-wide
    maximum, invert back, quantize. Then per pixel, if any original subpixel
    is >= 192 the whole original pixel is retained, which preserves
    highlights such as street lights.
    """
    ensure_image_u8(img)
    inverted = 765.0 - img.astype(np.float64)
    peak = image_max(inverted)
    darkened = _quantize(255.0 - inverted * 255.0 / peak)
    keep = (img >= RAIN_KEEP_LEVEL).any(axis=2)
    darkened[keep] = img[keep]
    return darkened


_DISPATCH = {
    AugmentKind.IDENTITY: augment_identity,
    AugmentKind.DARK: augment_dark,
    AugmentKind.OVEREXPOSE: augment_overexpose,
    AugmentKind.FOG: augment_fog,
    AugmentKind.DARK_RAINY: augment_dark_rainy,
}


def apply_augment(img: np.ndarray, kind: AugmentKind | str) -> np.ndarray:
    """Run one augment selected by kind."""
    return _DISPATCH[AugmentKind(kind)](img)
