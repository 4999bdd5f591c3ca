"""The protocol loop: handshake, then lockstep request/response on stdio.

Wire format (newline-delimited JSON):

* handshake out: ``{"type": "handshake", "name", "task", "input_width",
  "input_height", "class_count", "meta"}``
* request in: ``{"type": "classify"|"detect", "id", "image_png": base64,
  "original_width", "original_height"}`` (image already resized to the
  handshake dimensions by the caller)
* classification out: ``{"type": "classification", "id", "classes": top-5
  by raw logit, "scores": the logits}``
* detection out: ``{"type": "detection", "id", "boxes": [...]}`` with boxes
  mapped back to original image coordinates
* failures: ``{"type": "error", "id", "message"}``; the loop keeps serving.
"""

from __future__ import annotations

import base64
import io
import json
import sys

import numpy as np
from PIL import Image

from .models import TASK_CLASSIFICATION, ModelSpec

TOP_K = 5


def _decode_image(payload: dict) -> np.ndarray:
    raw = base64.b64decode(payload["image_png"])
    with Image.open(io.BytesIO(raw)) as im:
        return np.asarray(im.convert("RGB"), dtype=np.uint8)


def rank_logits(logits: np.ndarray, top_k: int = TOP_K) -> tuple[list, list]:
    """Top-k class ids by raw logit, ties broken by lower class id."""
    order = np.argsort(-logits, kind="stable")[:top_k]
    return [int(i) for i in order], [float(logits[i]) for i in order]


def scale_boxes(boxes, received_w, received_h, original_w, original_h) -> list:
    """Map (class, conf, x, y, w, h) from received to original coordinates."""
    sx = original_w / received_w
    sy = original_h / received_h
    return [
        {
            "class": class_id,
            "confidence": conf,
            "x": x * sx,
            "y": y * sy,
            "width": w * sx,
            "height": h * sy,
        }
        for class_id, conf, x, y, w, h in boxes
    ]


def serve(spec: ModelSpec, model, meta: dict | None = None, stdin=None, stdout=None) -> None:
    """Answer protocol requests until stdin closes."""
    stdin = stdin if stdin is not None else sys.stdin
    stdout = stdout if stdout is not None else sys.stdout

    def emit(record: dict) -> None:
        stdout.write(json.dumps(record) + "\n")
        stdout.flush()

    emit(
        {
            "type": "handshake",
            "name": spec.family,
            "task": spec.task,
            "input_width": spec.input_width,
            "input_height": spec.input_height,
            "class_count": spec.class_count,
            "meta": meta or {},
        }
    )
    for line in stdin:
        if not line.strip():
            continue
        request_id = None
        try:
            request = json.loads(line)
            request_id = request.get("id")
            kind = request["type"]
            expected = "classify" if spec.task == TASK_CLASSIFICATION else "detect"
            if kind != expected:
                emit({"type": "error", "id": request_id,
                      "message": f"{kind!r} request sent to a {spec.task} backend"})
                continue
            img = _decode_image(request)
            if kind == "classify":
                classes, scores = rank_logits(model.logits(img))
                emit({"type": "classification", "id": request_id,
                      "classes": classes, "scores": scores})
            else:
                received_h, received_w = img.shape[:2]
                boxes = scale_boxes(
                    model.boxes(img), received_w, received_h,
                    int(request["original_width"]), int(request["original_height"]),
                )
                emit({"type": "detection", "id": request_id, "boxes": boxes})
        except Exception as exc:
            emit({"type": "error", "id": request_id, "message": f"request failed: {exc}"})
