import math

import numpy as np
import pytest

from advlens.image import save_png


def random_images(rng, count, max_side=32, min_side=1):
    """Seeded random uint8 images with varying sizes."""
    images = []
    for _ in range(count):
        h = int(rng.integers(min_side, max_side + 1))
        w = int(rng.integers(min_side, max_side + 1))
        images.append(rng.integers(0, 256, (h, w, 3), dtype=np.uint8))
    return images


def write_corpus(root, images):
    """Save images as img_000.png ... under root; returns the paths."""
    paths = []
    for i, img in enumerate(images):
        path = root / f"img_{i:03d}.png"
        save_png(img, path)
        paths.append(path)
    return paths


def stub_labels(images, class_count=1000, input_w=224, input_h=224):
    """Labels the stub backend predicts rank-1 for unaugmented images.

    Mirrors the harness pipeline: the backend sees the image resized to its
    handshake dimensions, so the mean is taken after that resize.
    """
    from advlens.image import resize_bilinear

    return [
        int(math.floor(resize_bilinear(img, input_w, input_h).mean())) % class_count
        for img in images
    ]


def write_index_manifest(root, images, labels):
    """Corpus + index-file manifest: returns the index path."""
    write_corpus(root, images)
    index = root / "index.tsv"
    index.write_text(
        "".join(f"img_{i:03d}.png\t{label}\n" for i, label in enumerate(labels)),
        encoding="utf-8",
    )
    return index


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
