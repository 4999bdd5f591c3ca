"""Matrix orchestration: every augment x enhancement arm through a backend.

Per image the pipeline order is fixed: decode, augment, enhance, resize to
the backend's declared input size, infer. Enhancement always sees the
augmented image, never the original. Cells that lose their backend mid-run
are marked failed and the matrix keeps going; only a fully failed matrix
raises.

Reports are deterministic: with the stub backend, identical corpus bytes
produce identical report bytes regardless of worker count.
"""

from __future__ import annotations

import csv
import io
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path

from .augment import AugmentKind, apply_augment
from .dataset import TASK_CLASSIFICATION, DatasetManifest
from .enhance import EnhanceKind, SsrConfig, apply_enhancement
from .errors import AdvlensError, ProtocolError, ReportError, RunError
from .image import load_image, resize_bilinear
from .metrics import DetectionRecord, classification_score, map_50_95
from .protocol import BackendSession

METRIC_CLASSIFICATION = "combined_accuracy"
METRIC_DETECTION = "map_50_95"

DEFAULT_AUGMENTS = tuple(AugmentKind)
DEFAULT_ENHANCEMENTS = tuple(EnhanceKind)


@dataclass(frozen=True)
class MatrixCell:
    augment: str
    enhancement: str
    metric: str
    value: float | None
    error: str | None = None
    extras: dict = field(default_factory=dict)


@dataclass(frozen=True)
class DeltaRow:
    augment: str
    enhancement: str
    delta_points: float | None
    error: str | None = None


@dataclass(frozen=True)
class MatrixReport:
    model: str
    task: str
    metric: str
    backend: dict
    dataset: dict
    config: dict
    cells: tuple
    deltas: tuple


# ---------------------------------------------------------------------------
# Cell evaluation
# ---------------------------------------------------------------------------

def _pipeline(sample_path, augment, enhancement, ssr, input_w, input_h):
    img = load_image(sample_path)
    out = apply_augment(img, augment)
    out = apply_enhancement(out, enhancement, ssr)
    out = resize_bilinear(out, input_w, input_h)
    return img, out


def _evaluate_cell(manifest, sessions, augment, enhancement, ssr):
    handshake = sessions[0].handshake
    per_sample = {}

    def run_worker(worker_id):
        session = sessions[worker_id]
        results = {}
        for index in range(worker_id, len(manifest.samples), len(sessions)):
            sample = manifest.samples[index]
            img, prepared = _pipeline(
                sample.image_path, augment, enhancement, ssr,
                handshake.input_width, handshake.input_height,
            )
            orig_h, orig_w = img.shape[:2]
            if manifest.task == TASK_CLASSIFICATION:
                ranked = session.classify(prepared, orig_w, orig_h)
                results[index] = [class_id for class_id, _ in ranked]
            else:
                results[index] = session.detect(prepared, orig_w, orig_h)
        return results

    if len(sessions) == 1:
        per_sample.update(run_worker(0))
    else:
        with ThreadPoolExecutor(max_workers=len(sessions)) as pool:
            for chunk in pool.map(run_worker, range(len(sessions))):
                per_sample.update(chunk)

    if manifest.task == TASK_CLASSIFICATION:
        predictions = [per_sample[i] for i in range(len(manifest.samples))]
        labels = [s.label for s in manifest.samples]
        score = classification_score(predictions, labels)
        return score.combined, {"top1": score.top1, "top5": score.top5}

    gts = [
        DetectionRecord(image_id=s.image_id, class_id=b.class_index, box=b.box)
        for s in manifest.samples
        for b in s.boxes
    ]
    preds = [
        DetectionRecord(
            image_id=manifest.samples[i].image_id,
            class_id=p.class_id,
            box=p.box,
            confidence=p.confidence,
        )
        for i in range(len(manifest.samples))
        for p in per_sample[i]
    ]
    result = map_50_95(preds, gts)
    extras = {
        f"ap_{int(round(t * 100))}": v
        for t, v in zip(result.thresholds, result.per_threshold)
    }
    return result.map_50_95, extras


# ---------------------------------------------------------------------------
# Matrix run
# ---------------------------------------------------------------------------

def run_matrix(
    manifest: DatasetManifest,
    backend_command,
    augments=DEFAULT_AUGMENTS,
    enhancements=DEFAULT_ENHANCEMENTS,
    ssr: SsrConfig = SsrConfig(),
    workers: int = 1,
    model_id: str | None = None,
) -> MatrixReport:
    """Run the full augment x enhancement grid and assemble a report."""
    augments = [AugmentKind(a) for a in augments]
    enhancements = [EnhanceKind(e) for e in enhancements]
    if not augments or not enhancements:
        raise RunError("matrix needs at least one augment and one enhancement")
    if not manifest.samples:
        raise RunError("manifest has no samples")

    worker_count = max(1, min(workers, len(manifest.samples)))
    sessions = [BackendSession(backend_command)]
    handshake = sessions[0].handshake
    if handshake.task != manifest.task:
        sessions[0].close()
        raise ProtocolError(
            f"backend task {handshake.task!r} does not match dataset task {manifest.task!r}"
        )
    metric = METRIC_CLASSIFICATION if manifest.task == TASK_CLASSIFICATION else METRIC_DETECTION

    cells = []
    try:
        for augment in augments:
            for enhancement in enhancements:
                try:
                    _ensure_sessions(sessions, backend_command, worker_count)
                    value, extras = _evaluate_cell(manifest, sessions, augment, enhancement, ssr)
                    cells.append(MatrixCell(augment.value, enhancement.value, metric,
                                            value, extras=extras))
                except AdvlensError as exc:
                    cells.append(MatrixCell(augment.value, enhancement.value, metric,
                                            None, error=str(exc)))
    finally:
        for session in sessions:
            session.close()

    if all(cell.error is not None for cell in cells):
        raise RunError(f"every cell failed; last error: {cells[-1].error}")

    report = MatrixReport(
        model=model_id or handshake.name,
        task=manifest.task,
        metric=metric,
        backend={
            "name": handshake.name,
            "input_width": handshake.input_width,
            "input_height": handshake.input_height,
            "class_count": handshake.class_count,
            "meta": handshake.meta,
        },
        dataset={"samples": len(manifest.samples), "classes": len(manifest.class_names)},
        config={
            "augments": [a.value for a in augments],
            "enhancements": [e.value for e in enhancements],
            "sigma": ssr.sigma,
        },
        cells=tuple(cells),
        deltas=(),
    )
    if EnhanceKind.NONE in enhancements and len(enhancements) > 1:
        report = replace(report, deltas=tuple(delta_report(report)))
    return report


def _ensure_sessions(sessions, backend_command, count):
    """Prune dead sessions and top the pool back up to count, in place."""
    dead = [s for s in sessions if not s.alive()]
    for session in dead:
        session.close()
        sessions.remove(session)
    while len(sessions) < count:
        sessions.append(BackendSession(backend_command))


# ---------------------------------------------------------------------------
# Delta table
# ---------------------------------------------------------------------------

def delta_report(report: MatrixReport) -> list:
    """Change in the metric, in percentage points, for every enhanced arm.

    delta = 100 * (metric_enhanced - metric_baseline) where the baseline is
    the enhancement=none cell of the same augment. This is an absolute
    difference of percentages, not a relative improvement: baseline 0.70 vs
    enhanced 0.85 reports +15.0 points.
    """
    by_augment: dict = {}
    for cell in report.cells:
        by_augment.setdefault(cell.augment, {})[cell.enhancement] = cell

    rows = []
    for augment, arms in by_augment.items():
        baseline = arms.get(EnhanceKind.NONE.value)
        if baseline is None:
            raise ReportError(f"augment {augment!r} has no enhancement=none baseline cell")
        for enhancement, cell in arms.items():
            if enhancement == EnhanceKind.NONE.value:
                continue
            if baseline.value is None or cell.value is None:
                rows.append(DeltaRow(augment, enhancement, None,
                                     error=cell.error or baseline.error))
            else:
                delta = round(100.0 * (cell.value - baseline.value), 10)
                rows.append(DeltaRow(augment, enhancement, delta))
    return rows


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------

def report_to_json_text(report: MatrixReport) -> str:
    payload = {
        "model": report.model,
        "task": report.task,
        "metric": report.metric,
        "backend": report.backend,
        "dataset": report.dataset,
        "config": report.config,
        "cells": [
            {
                "augment": c.augment,
                "enhancement": c.enhancement,
                "metric": c.metric,
                "value": c.value,
                "error": c.error,
                "extras": c.extras,
            }
            for c in report.cells
        ],
        "deltas": [
            {
                "augment": d.augment,
                "enhancement": d.enhancement,
                "delta_points": d.delta_points,
                "error": d.error,
            }
            for d in report.deltas
        ],
    }
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def report_from_json_text(text: str) -> MatrixReport:
    try:
        payload = json.loads(text)
        return MatrixReport(
            model=payload["model"],
            task=payload["task"],
            metric=payload["metric"],
            backend=payload.get("backend", {}),
            dataset=payload.get("dataset", {}),
            config=payload.get("config", {}),
            cells=tuple(
                MatrixCell(
                    augment=c["augment"],
                    enhancement=c["enhancement"],
                    metric=c.get("metric", ""),
                    value=c.get("value"),
                    error=c.get("error"),
                    extras=c.get("extras", {}),
                )
                for c in payload["cells"]
            ),
            deltas=tuple(
                DeltaRow(
                    augment=d["augment"],
                    enhancement=d["enhancement"],
                    delta_points=d.get("delta_points"),
                    error=d.get("error"),
                )
                for d in payload.get("deltas", [])
            ),
        )
    except (json.JSONDecodeError, KeyError, TypeError) as exc:
        raise ReportError(f"not a saved matrix report: {exc}") from exc


def report_to_csv_text(report: MatrixReport) -> str:
    """Metric rows as CSV: model, augment, enhancement, metric, value."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["model", "augment", "enhancement", "metric", "value"])
    for cell in report.cells:
        writer.writerow([
            report.model, cell.augment, cell.enhancement, cell.metric,
            "" if cell.value is None else repr(cell.value),
        ])
    for row in report.deltas:
        writer.writerow([
            report.model, row.augment, row.enhancement, f"{report.metric}_delta_pp",
            "" if row.delta_points is None else repr(row.delta_points),
        ])
    return buf.getvalue()


def write_report(report: MatrixReport, path: str | Path, fmt: str) -> None:
    text = report_to_json_text(report) if fmt == "json" else report_to_csv_text(report)
    Path(path).write_text(text, encoding="utf-8")
