import numpy as np
import pytest

from advlens.augment import (
    AugmentKind,
    apply_augment,
    augment_dark,
    augment_dark_rainy,
    augment_fog,
    augment_identity,
    augment_overexpose,
    image_max,
)
from advlens.errors import EmptyInputError

from conftest import random_images
from oracle_augment import (
    oracle_dark,
    oracle_dark_rainy,
    oracle_fog,
    oracle_identity,
    oracle_overexpose,
)


class TestImageMax:
    def test_constant(self):
        assert image_max(np.full((3, 3, 3), 2550.0)) == 2550.0

    def test_two_values(self):
        arr = np.full((2, 2, 3), 2550.0)
        arr[1, 1, 2] = 2805.0
        assert image_max(arr) == 2805.0

    def test_dominates_all_subpixels(self, rng):
        arr = rng.random((5, 4, 3)) * 3000
        assert (image_max(arr) >= arr).all()

    def test_empty_rejected(self):
        with pytest.raises(EmptyInputError):
            image_max(np.zeros((0, 3, 3)))


class TestDark:
    def test_floor_arithmetic(self):
        img = np.array([[[200, 100, 8]]], dtype=np.uint8)
        assert augment_dark(img).tolist() == [[[25, 12, 1]]]

    def test_all_zero_fixed(self):
        img = np.zeros((4, 4, 3), dtype=np.uint8)
        assert (augment_dark(img) == 0).all()

    def test_output_never_exceeds_31(self, rng):
        img = rng.integers(0, 256, (16, 16, 3), dtype=np.uint8)
        assert augment_dark(img).max() <= 31


class TestOverexpose:
    def test_clipping_boundary(self):
        img = np.array([[[127, 128, 200]]], dtype=np.uint8)
        assert augment_overexpose(img).tolist() == [[[254, 255, 255]]]

    def test_all_zero_fixed(self):
        img = np.zeros((4, 4, 3), dtype=np.uint8)
        assert (augment_overexpose(img) == 0).all()

    def test_saturated_fraction_equals_inputs_at_or_above_128(self, rng):
        img = rng.integers(0, 256, (20, 20, 3), dtype=np.uint8)
        out = augment_overexpose(img)
        assert (out == 255).sum() == (img >= 128).sum()

    def test_monotone(self, rng):
        a = rng.integers(0, 200, (10, 10, 3), dtype=np.uint8)
        b = (a + rng.integers(0, 56, a.shape)).astype(np.uint8)
        assert (augment_overexpose(a) <= augment_overexpose(b)).all()


class TestFog:
    def test_constant_image_goes_white(self):
        for level in (0, 93, 255):
            img = np.full((3, 5, 3), level, dtype=np.uint8)
            assert (augment_fog(img) == 255).all()

    def test_binary_image_two_levels(self):
        # {0, 255} input: 2550 * 255 / 2805 = 231.8 -> 232
        img = np.zeros((2, 2, 3), dtype=np.uint8)
        img[0, 0] = 255
        out = augment_fog(img)
        assert set(np.unique(out)) == {232, 255}
        assert (oracle_fog(img) == out).all()

    def test_floor_is_232_when_255_present(self, rng):
        img = rng.integers(0, 256, (12, 12, 3), dtype=np.uint8)
        img[0, 0, 0] = 255
        assert augment_fog(img).min() >= 232


class TestDarkRainy:
    def _image_with_known_pixels(self):
        img = np.full((3, 3, 3), 50, dtype=np.uint8)
        img[0, 0] = (0, 0, 0)        # forces image_max(x1) = 765
        img[1, 1] = (90, 90, 90)
        img[2, 2] = (200, 10, 10)    # bright subpixel, pixel retained
        return img

    def test_hand_chain(self):
        out = augment_dark_rainy(self._image_with_known_pixels())
        assert out[0, 0].tolist() == [0, 0, 0]
        # x1 = 675 -> x2 = 675*255/765 = 225 -> x3 = 30
        assert out[1, 1].tolist() == [30, 30, 30]
        assert out[2, 2].tolist() == [200, 10, 10]

    def test_threshold_retention_is_whole_pixel(self, rng):
        img = rng.integers(0, 256, (24, 24, 3), dtype=np.uint8)
        out = augment_dark_rainy(img)
        keep = (img >= 192).any(axis=2)
        assert (out[keep] == img[keep]).all()

    def test_uniform_image_no_division_hazard(self):
        img = np.full((4, 4, 3), 255, dtype=np.uint8)
        out = augment_dark_rainy(img)
        assert (out == img).all()  # every pixel retained at level 255


class TestIdentity:
    def test_copy_is_bit_identical_and_independent(self, rng):
        img = rng.integers(0, 256, (6, 6, 3), dtype=np.uint8)
        out = augment_identity(img)
        assert (out == img).all()
        out[0, 0, 0] ^= 0xFF
        assert out[0, 0, 0] != img[0, 0, 0]

    def test_compose_with_any_augment(self, rng):
        img = rng.integers(0, 256, (8, 8, 3), dtype=np.uint8)
        for kind in AugmentKind:
            direct = apply_augment(img, kind)
            composed = apply_augment(augment_identity(img), kind)
            assert (direct == composed).all()


ORACLES = {
    AugmentKind.IDENTITY: oracle_identity,
    AugmentKind.DARK: oracle_dark,
    AugmentKind.OVEREXPOSE: oracle_overexpose,
    AugmentKind.FOG: oracle_fog,
    AugmentKind.DARK_RAINY: oracle_dark_rainy,
}


@pytest.mark.parametrize("kind", list(AugmentKind))
def test_oracle_equivalence(kind, rng):
    for img in random_images(rng, 60, max_side=16):
        expected = ORACLES[kind](img)
        actual = apply_augment(img, kind)
        assert (actual == expected).all(), kind


def test_all_augments_total_and_in_range(rng):
    for img in random_images(rng, 10, max_side=16):
        for kind in AugmentKind:
            out = apply_augment(img, kind)
            assert out.dtype == np.uint8
            assert out.shape == img.shape
