"""Validation-set ingestion and resize-only preprocessing.

Two layouts are understood for classification: a directory per class, or a
UTF-8 index file with one ``relative/path<TAB>label`` row per sample.
Detection uses a COCO-style annotation file (images / annotations /
categories sections) alongside an image root.

Boxes stay in original image coordinates from load through evaluation; the
backend protocol returns predictions in original coordinates too, so no
coordinate transform ever runs in between.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import EmptyDatasetError, ManifestError, ParseError
from .image import IMAGE_SUFFIXES, resize_bilinear
from .metrics import Box

log = logging.getLogger(__name__)

TASK_CLASSIFICATION = "classification"
TASK_DETECTION = "detection"


@dataclass(frozen=True)
class ClassificationSample:
    image_path: Path
    label: int


@dataclass(frozen=True)
class BoxAnnotation:
    class_index: int
    box: Box


@dataclass(frozen=True)
class DetectionSample:
    image_path: Path
    image_id: int
    boxes: tuple


@dataclass(frozen=True)
class DatasetManifest:
    task: str
    class_names: tuple
    samples: tuple
    dropped_boxes: int = 0

    def __len__(self) -> int:
        return len(self.samples)


def _is_image(path: Path) -> bool:
    return path.suffix.lower() in IMAGE_SUFFIXES


def load_classification_manifest(root: str | Path) -> DatasetManifest:
    """Load a classification set from a class-directory tree or an index file.

    Sample order is lexicographic by path. Index-file labels that all parse
    as non-negative integers are taken as class indices directly; otherwise
    they are class names, sorted to assign indices.
    """
    root = Path(root)
    if not root.exists():
        raise ManifestError(f"dataset root does not exist: {root}")
    if root.is_dir():
        return _load_class_directories(root)
    return _load_index_file(root)


def _load_class_directories(root: Path) -> DatasetManifest:
    class_dirs = sorted(p for p in root.iterdir() if p.is_dir())
    if not class_dirs:
        raise EmptyDatasetError(f"no class directories under {root}")
    class_names = tuple(p.name for p in class_dirs)
    samples = []
    for index, class_dir in enumerate(class_dirs):
        for path in sorted(class_dir.rglob("*")):
            if path.is_file() and _is_image(path):
                samples.append(ClassificationSample(image_path=path, label=index))
    if not samples:
        raise EmptyDatasetError(f"no images under {root}")
    samples.sort(key=lambda s: str(s.image_path))
    return DatasetManifest(TASK_CLASSIFICATION, class_names, tuple(samples))


def _load_index_file(index_path: Path) -> DatasetManifest:
    base = index_path.parent
    rows = []
    for lineno, line in enumerate(index_path.read_text(encoding="utf-8").splitlines(), 1):
        if not line.strip():
            continue
        parts = line.split("\t")
        if len(parts) != 2:
            raise ParseError(f"{index_path}:{lineno}: expected 'path<TAB>label'")
        rows.append((parts[0], parts[1]))
    if not rows:
        raise EmptyDatasetError(f"index file {index_path} has no rows")

    labels = [label for _, label in rows]
    if all(label.isdigit() for label in labels):
        indices = [int(label) for label in labels]
        class_names = tuple(str(i) for i in range(max(indices) + 1))
    else:
        class_names = tuple(sorted(set(labels)))
        name_to_index = {name: i for i, name in enumerate(class_names)}
        indices = [name_to_index[label] for label in labels]

    samples = []
    for (rel_path, _), label in zip(rows, indices):
        path = base / rel_path
        if not path.is_file():
            raise ManifestError(f"index references missing image: {path}")
        samples.append(ClassificationSample(image_path=path, label=label))
    samples.sort(key=lambda s: str(s.image_path))
    return DatasetManifest(TASK_CLASSIFICATION, class_names, tuple(samples))


def load_detection_manifest(annotations: str | Path, image_root: str | Path) -> DatasetManifest:
    """Load a COCO-style annotation file; boxes grouped per image.

    Sparse category ids are remapped to contiguous indices in ascending id
    order. Boxes are clamped to image bounds; boxes degenerating to zero
    area are dropped and counted. Images without annotations are kept, since
    they still penalize false positives.
    """
    annotations = Path(annotations)
    image_root = Path(image_root)
    try:
        payload = json.loads(annotations.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ParseError(f"cannot parse {annotations}: {exc}") from exc

    for section in ("images", "annotations", "categories"):
        if section not in payload or not isinstance(payload[section], list):
            raise ParseError(f"{annotations}: missing or invalid '{section}' section")

    try:
        categories = sorted(payload["categories"], key=lambda c: int(c["id"]))
        category_index = {int(c["id"]): i for i, c in enumerate(categories)}
        class_names = tuple(str(c["name"]) for c in categories)
        images = {
            int(im["id"]): (str(im["file_name"]), float(im["width"]), float(im["height"]))
            for im in payload["images"]
        }
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"{annotations}: malformed record: {exc}") from exc

    if not images:
        raise EmptyDatasetError(f"{annotations} lists no images")

    boxes_by_image: dict[int, list] = {image_id: [] for image_id in images}
    dropped = 0
    for ann in payload["annotations"]:
        try:
            image_id = int(ann["image_id"])
            category_id = int(ann["category_id"])
            x, y, w, h = (float(v) for v in ann["bbox"])
        except (KeyError, TypeError, ValueError) as exc:
            raise ParseError(f"{annotations}: malformed annotation: {exc}") from exc
        if image_id not in images:
            raise ManifestError(f"annotation references unknown image id {image_id}")
        if category_id not in category_index:
            raise ManifestError(f"annotation references unknown category id {category_id}")
        _, img_w, img_h = images[image_id]
        x0 = min(max(x, 0.0), img_w)
        y0 = min(max(y, 0.0), img_h)
        x1 = min(max(x + w, 0.0), img_w)
        y1 = min(max(y + h, 0.0), img_h)
        if x1 - x0 <= 0 or y1 - y0 <= 0:
            dropped += 1
            continue
        boxes_by_image[image_id].append(
            BoxAnnotation(category_index[category_id], Box(x0, y0, x1 - x0, y1 - y0))
        )
    if dropped:
        log.warning("dropped %d zero-area boxes from %s", dropped, annotations)

    samples = tuple(
        DetectionSample(
            image_path=image_root / images[image_id][0],
            image_id=image_id,
            boxes=tuple(boxes_by_image[image_id]),
        )
        for image_id in sorted(images)
    )
    return DatasetManifest(TASK_DETECTION, class_names, samples, dropped_boxes=dropped)


def prepare(img: np.ndarray, target_w: int, target_h: int) -> np.ndarray:
    """Resize-only preprocessing; deliberately no normalization or crop."""
    return resize_bilinear(img, target_w, target_h)


def subsample(manifest: DatasetManifest, limit: int, seed: int) -> DatasetManifest:
    """Deterministically subsample a manifest, preserving sample order."""
    if limit >= len(manifest.samples):
        return manifest
    rng = np.random.default_rng(seed)
    picked = sorted(rng.choice(len(manifest.samples), size=limit, replace=False))
    samples = tuple(manifest.samples[i] for i in picked)
    return DatasetManifest(manifest.task, manifest.class_names, samples, manifest.dropped_boxes)
