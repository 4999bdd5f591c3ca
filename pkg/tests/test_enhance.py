import numpy as np
import pytest

from advlens.augment import augment_dark
from advlens.enhance import (
    EnhanceKind,
    SsrConfig,
    apply_enhancement,
    build_equalization_lut,
    enhance_he,
    enhance_ssr,
    gaussian_blur,
    gaussian_kernel,
)
from advlens.errors import EmptyInputError, InvalidParameterError
from advlens.image import (
    Histogram256,
    channel_histogram,
    hsv_planes_to_rgb_image,
    rgb_image_to_hsv_planes,
)

from conftest import random_images


def _hist_from_counts(counts):
    bins = np.zeros(256, dtype=np.int64)
    for level, count in counts.items():
        bins[level] = count
    return Histogram256(bins=bins, total=int(bins.sum()))


class TestEqualizationLut:
    def test_single_level_gives_identity(self):
        lut = build_equalization_lut(_hist_from_counts({77: 1000}))
        assert (lut == np.arange(256)).all()

    def test_two_level_stretch(self):
        lut = build_equalization_lut(_hist_from_counts({50: 500, 200: 500}))
        assert lut[50] == 0
        assert lut[200] == 255

    def test_uniform_histogram_near_identity(self):
        lut = build_equalization_lut(_hist_from_counts({i: 1000 for i in range(256)}))
        assert (np.abs(lut.astype(int) - np.arange(256)) <= 1).all()

    def test_monotone_and_in_range_random(self, rng):
        for _ in range(200):
            values = rng.integers(0, 256, int(rng.integers(1, 400)))
            lut = build_equalization_lut(channel_histogram(values))
            assert (np.diff(lut.astype(int)) >= 0).all()
            assert lut.min() >= 0 and lut.max() <= 255

    def test_empty_rejected(self):
        with pytest.raises(EmptyInputError):
            build_equalization_lut(Histogram256(bins=np.zeros(256, dtype=np.int64), total=0))


class TestEnhanceHe:
    def test_constant_image_is_fixed_point(self):
        img = np.full((6, 6, 3), 120, dtype=np.uint8)
        assert (enhance_he(img) == img).all()

    def test_constant_gray_is_fixed_point(self):
        img = np.full((4, 4, 3), 50, dtype=np.uint8)
        assert (enhance_he(img) == img).all()

    def test_hue_saturation_planes_pass_through_untouched(self, rng):
        # The output must equal a reconstruction from the INPUT chroma
        # planes with only the value plane remapped: proof that h and s
        # were bit-invariant through the algorithm.
        for img in random_images(rng, 25, max_side=24):
            h, s, v = rgb_image_to_hsv_planes(img)
            lut = build_equalization_lut(channel_histogram(v))
            expected = hsv_planes_to_rgb_image(h, s, lut[v])
            assert (enhance_he(img) == expected).all()

    def test_value_rank_order_preserved(self, rng):
        img = rng.integers(0, 256, (16, 16, 3), dtype=np.uint8)
        _, _, v_in = rgb_image_to_hsv_planes(img)
        lut = build_equalization_lut(channel_histogram(v_in))
        v_out = lut[v_in]
        flat_in = v_in.reshape(-1).astype(int)
        flat_out = v_out.reshape(-1).astype(int)
        order = np.argsort(flat_in, kind="stable")
        assert (np.diff(flat_out[order]) >= 0).all()

    def test_double_he_within_one_level(self, rng):
        for img in random_images(rng, 20, max_side=24, min_side=4):
            once = enhance_he(img)
            twice = enhance_he(once)
            _, _, v_once = rgb_image_to_hsv_planes(once)
            _, _, v_twice = rgb_image_to_hsv_planes(twice)
            assert np.abs(v_once.astype(int) - v_twice.astype(int)).max() <= 1

    def test_dark_sample_value_mean_increases(self, rng):
        dark = [augment_dark(img) for img in random_images(rng, 20, max_side=24, min_side=4)]
        v_in_sum = 0.0
        v_out_sum = 0.0
        count = 0
        for img in dark:
            _, _, v_in = rgb_image_to_hsv_planes(img)
            _, _, v_out = rgb_image_to_hsv_planes(enhance_he(img))
            v_in_sum += v_in.sum()
            v_out_sum += v_out.sum()
            count += v_in.size
        assert v_out_sum / count > v_in_sum / count


class TestGaussian:
    def test_kernel_sums_to_one(self):
        for sigma in (0.3, 1.0, 2.0, 17.5, 100.0):
            kernel = gaussian_kernel(sigma)
            assert abs(kernel.sum() - 1.0) < 1e-12
            assert kernel.size == 2 * int(np.ceil(3.0 * sigma)) + 1

    def test_constant_plane_unchanged(self):
        plane = np.full((9, 14), 42.0)
        out = gaussian_blur(plane, 3.0)
        assert np.allclose(out, 42.0, rtol=0, atol=1e-10)

    def test_impulse_center_is_squared_center_weight(self):
        kernel = gaussian_kernel(2.0)
        radius = kernel.size // 2
        plane = np.zeros((25, 25))
        plane[12, 12] = 1.0
        out = gaussian_blur(plane, 2.0)
        assert out[12, 12] == kernel[radius] * kernel[radius]

    def test_linearity(self, rng):
        p = rng.random((12, 17)) * 255
        q = rng.random((12, 17)) * 255
        a, b = 1.7, -0.4
        lhs = gaussian_blur(a * p + b * q, 2.5)
        rhs = a * gaussian_blur(p, 2.5) + b * gaussian_blur(q, 2.5)
        scale = np.abs(rhs).max()
        assert np.abs(lhs - rhs).max() / scale < 1e-9

    def test_bad_sigma_rejected(self):
        with pytest.raises(InvalidParameterError):
            gaussian_kernel(0.0)
        with pytest.raises(InvalidParameterError):
            gaussian_blur(np.ones((3, 3)), -1.0)

    def test_empty_plane_rejected(self):
        with pytest.raises(EmptyInputError):
            gaussian_blur(np.zeros((0, 4)), 1.0)


class TestEnhanceSsr:
    def test_constant_image_goes_flat_127(self):
        img = np.full((8, 8, 3), 200, dtype=np.uint8)
        assert (enhance_ssr(img, SsrConfig(sigma=5.0)) == 127).all()

    def test_output_spans_full_range_per_channel(self, rng):
        img = rng.integers(0, 256, (24, 24, 3), dtype=np.uint8)
        out = enhance_ssr(img, SsrConfig(sigma=4.0))
        for c in range(3):
            assert out[:, :, c].min() == 0
            assert out[:, :, c].max() == 255

    def test_illumination_scaling_mostly_cancels(self, rng):
        agree = 0
        total = 0
        for _ in range(3):
            img = rng.integers(8, 128, (32, 32, 3), dtype=np.uint8)
            doubled = np.minimum(img.astype(np.int64) * 2, 255).astype(np.uint8)
            out1 = enhance_ssr(img, SsrConfig(sigma=10.0))
            out2 = enhance_ssr(doubled, SsrConfig(sigma=10.0))
            agree += (np.abs(out1.astype(int) - out2.astype(int)) <= 6).sum()
            total += img.size
        assert agree / total >= 0.95

    def test_bad_sigma_rejected(self):
        with pytest.raises(InvalidParameterError):
            SsrConfig(sigma=0.0)


class TestApplyEnhancement:
    def test_none_is_identity(self, rng):
        img = rng.integers(0, 256, (5, 5, 3), dtype=np.uint8)
        assert (apply_enhancement(img, EnhanceKind.NONE) == img).all()

    def test_he_on_constant_unchanged(self):
        img = np.full((5, 5, 3), 9, dtype=np.uint8)
        assert (apply_enhancement(img, "he") == img).all()

    def test_rx_on_constant_all_127(self):
        img = np.full((5, 5, 3), 9, dtype=np.uint8)
        assert (apply_enhancement(img, "rx", SsrConfig(sigma=3.0)) == 127).all()
