"""Evaluation metrics: Top-1/Top-5 accuracy, mAP 50:95, pixel statistics.

The detection metric is the COCO-style definition pinned down exactly:
greedy confidence-ordered matching, 101-point interpolated average
precision, IoU thresholds 0.50 to 0.95 in steps of 0.05, averaged over the
classes present in the ground truth.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    EmptyInputError,
    InputMismatchError,
    InvalidBoxError,
    InvalidPredictionError,
)
from .image import ensure_image_u8

IOU_THRESHOLDS = tuple((50 + 5 * k) / 100.0 for k in range(10))
RECALL_SAMPLES = tuple(k / 100.0 for k in range(101))


# ---------------------------------------------------------------------------
# Classification
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ClassificationResult:
    top1: float
    top5: float

    @property
    def combined(self) -> float:
        """Arithmetic mean of Top-1 and Top-5, the reported classifier metric."""
        return (self.top1 + self.top5) / 2.0


def classification_score(predictions, labels) -> ClassificationResult:
    """Score ranked class predictions against integer labels.

    Each prediction is a class list ranked best first, at least 5 entries,
    no duplicates. top1 is the fraction where rank 1 equals the label, top5
    the fraction where the label appears in ranks 1-5.
    """
    if len(predictions) != len(labels):
        raise InputMismatchError(
            f"{len(predictions)} prediction lists vs {len(labels)} labels"
        )
    hits1 = 0
    hits5 = 0
    for ranked, label in zip(predictions, labels):
        if len(ranked) < 5:
            raise InvalidPredictionError(f"ranked list has {len(ranked)} entries, need >= 5")
        if len(set(ranked)) != len(ranked):
            raise InvalidPredictionError("ranked list contains duplicate classes")
        if ranked[0] == label:
            hits1 += 1
        if label in ranked[:5]:
            hits5 += 1
    n = len(labels)
    return ClassificationResult(top1=hits1 / n, top5=hits5 / n)


# ---------------------------------------------------------------------------
# Detection
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Box:
    """Axis-aligned box: top-left corner plus size, in pixels."""

    x: float
    y: float
    width: float
    height: float

    def area(self) -> float:
        return self.width * self.height


@dataclass(frozen=True)
class DetectionRecord:
    """One ground-truth or predicted box; confidence is None for ground truth."""

    image_id: int | str
    class_id: int
    box: Box
    confidence: float | None = None


def iou(a: Box, b: Box) -> float:
    """Intersection over union of two positive-area boxes; 0 when disjoint."""
    if a.width <= 0 or a.height <= 0 or b.width <= 0 or b.height <= 0:
        raise InvalidBoxError(f"boxes must have positive area: {a}, {b}")
    ix = min(a.x + a.width, b.x + b.width) - max(a.x, b.x)
    iy = min(a.y + a.height, b.y + b.height) - max(a.y, b.y)
    if ix <= 0 or iy <= 0:
        return 0.0
    inter = ix * iy
    return inter / (a.area() + b.area() - inter)


def average_precision(preds, gts, iou_thr: float) -> float:
    """101-point interpolated AP for one class at one IoU threshold.

    Predictions are visited in descending confidence (ties keep input
    order) and greedily matched to the unmatched ground truth of the same
    image with the highest IoU >= iou_thr (IoU ties keep ground-truth input
    order). AP is the mean of interpolated precision over the 101 recall
    samples 0.00..1.00, where interpolated precision at recall r is the
    maximum precision attained at recall >= r, or 0 if none is.

    A class with no ground truths scores 0 here; ``map_50_95`` excludes it
    from the mean.
    """
    n_gt = len(gts)
    if n_gt == 0 or len(preds) == 0:
        return 0.0

    gts_by_image: dict = {}
    for j, gt in enumerate(gts):
        gts_by_image.setdefault(gt.image_id, []).append(j)
    matched = [False] * n_gt

    order = sorted(range(len(preds)), key=lambda i: -preds[i].confidence)
    tp_flags = []
    for i in order:
        pred = preds[i]
        best_j = -1
        best_iou = 0.0
        for j in gts_by_image.get(pred.image_id, ()):
            if matched[j]:
                continue
            overlap = iou(pred.box, gts[j].box)
            if overlap > best_iou:
                best_iou = overlap
                best_j = j
        if best_j >= 0 and best_iou >= iou_thr:
            matched[best_j] = True
            tp_flags.append(True)
        else:
            tp_flags.append(False)

    tp_cum = np.cumsum(tp_flags)
    ranks = np.arange(1, len(tp_flags) + 1)
    precisions = tp_cum / ranks
    recalls = tp_cum / n_gt

    # Precision envelope from the right, then sample at the 101 recall points.
    envelope = np.maximum.accumulate(precisions[::-1])[::-1]
    total = 0.0
    for r in RECALL_SAMPLES:
        idx = np.searchsorted(recalls, r, side="left")
        if idx < len(recalls):
            total += float(envelope[idx])
    return total / len(RECALL_SAMPLES)


@dataclass(frozen=True)
class DetectionResult:
    map_50_95: float
    per_threshold: tuple

    @property
    def thresholds(self) -> tuple:
        return IOU_THRESHOLDS


def map_50_95(preds, gts) -> DetectionResult:
    """mAP 50:95 over the classes present in the ground truth.

    Classes absent from the ground truth are excluded from the mean rather
    than scored zero. With no ground truth at all the result is 0.
    """
    classes = sorted({gt.class_id for gt in gts})
    if not classes:
        return DetectionResult(0.0, tuple(0.0 for _ in IOU_THRESHOLDS))
    preds_by_class: dict = {c: [] for c in classes}
    gts_by_class: dict = {c: [] for c in classes}
    for p in preds:
        if p.class_id in preds_by_class:
            preds_by_class[p.class_id].append(p)
    for g in gts:
        gts_by_class[g.class_id].append(g)

    per_threshold = []
    for thr in IOU_THRESHOLDS:
        ap_sum = 0.0
        for c in classes:
            ap_sum += average_precision(preds_by_class[c], gts_by_class[c], thr)
        per_threshold.append(ap_sum / len(classes))
    return DetectionResult(sum(per_threshold) / len(per_threshold), tuple(per_threshold))


# ---------------------------------------------------------------------------
# Pixel statistics
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PixelStats:
    """Pooled mean and population standard deviation in level units."""

    mean: float
    std: float


@dataclass
class PixelStatsAccumulator:
    """Single-pass accumulator over all subpixels of a stream of images.

    Sums are exact integers, so partial accumulators merge associatively
    and the final mean/variance carry only one rounding each.
    """

    count: int = 0
    level_sum: int = 0
    level_sumsq: int = 0

    def add_image(self, img: np.ndarray) -> None:
        ensure_image_u8(img)
        wide = img.astype(np.int64)
        self.count += int(wide.size)
        self.level_sum += int(wide.sum())
        self.level_sumsq += int((wide * wide).sum())

    def merge(self, other: "PixelStatsAccumulator") -> None:
        self.count += other.count
        self.level_sum += other.level_sum
        self.level_sumsq += other.level_sumsq

    def result(self) -> PixelStats:
        if self.count == 0:
            raise EmptyInputError("no subpixels accumulated")
        mean = self.level_sum / self.count
        var = (self.count * self.level_sumsq - self.level_sum * self.level_sum) / (
            self.count * self.count
        )
        return PixelStats(mean=mean, std=math.sqrt(var))


def dataset_pixel_stats(images) -> PixelStats:
    """Pooled mean/std over every subpixel of every image in the stream."""
    acc = PixelStatsAccumulator()
    for img in images:
        acc.add_image(img)
    return acc.result()
