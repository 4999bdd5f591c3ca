"""Deterministic stub inference backend for end-to-end tests.

Speaks the stdio protocol documented in :mod:`advlens.protocol` without any
ML dependency. Rules are fixed functions of the received pixels:

* classification: rank-1 class is floor(mean of all subpixels) mod the
  class count; ranks 2-5 are the next consecutive class indices.
* detection: one box covering the brightest 2x2 region, mapped back to
  original image coordinates, confidence = mean / 255.

Every response carries a ``checksum`` field (sha256 of the received pixel
bytes) so tests can verify exactly which image reached the backend.

This module keeps its imports light on purpose: it is spawned as a child
process per worker and must not drag in the compiled kernels.
"""

import argparse
import base64
import hashlib
import io
import json
import math
import sys

import numpy as np
from PIL import Image


def _decode(payload: dict) -> np.ndarray:
    raw = base64.b64decode(payload["image_png"])
    with Image.open(io.BytesIO(raw)) as im:
        return np.asarray(im.convert("RGB"), dtype=np.uint8)


def classify_rule(img: np.ndarray, class_count: int) -> tuple[list, list]:
    first = int(math.floor(img.mean())) % class_count
    classes = [(first + i) % class_count for i in range(5)]
    scores = [1.0 - 0.2 * i for i in range(5)]
    return classes, scores


def detect_rule(img: np.ndarray, class_count: int, original_w: int, original_h: int) -> list:
    h, w = img.shape[:2]
    brightness = img.astype(np.int64).sum(axis=2)
    if h >= 2 and w >= 2:
        windows = (
            brightness[:-1, :-1] + brightness[:-1, 1:]
            + brightness[1:, :-1] + brightness[1:, 1:]
        )
        flat = int(np.argmax(windows))  # first maximum, row-major
        by, bx = divmod(flat, windows.shape[1])
        box_w, box_h = 2, 2
    else:
        by, bx = 0, 0
        box_w, box_h = w, h
    scale_x = original_w / w
    scale_y = original_h / h
    mean = float(img.mean())
    return [
        {
            "class": int(math.floor(mean)) % class_count,
            "confidence": mean / 255.0,
            "x": bx * scale_x,
            "y": by * scale_y,
            "width": box_w * scale_x,
            "height": box_h * scale_y,
        }
    ]


def serve(task: str, width: int, height: int, class_count: int, name: str,
          stdin=None, stdout=None) -> None:
    stdin = stdin if stdin is not None else sys.stdin
    stdout = stdout if stdout is not None else sys.stdout

    def emit(record: dict) -> None:
        stdout.write(json.dumps(record) + "\n")
        stdout.flush()

    emit(
        {
            "type": "handshake",
            "name": name,
            "task": task,
            "input_width": width,
            "input_height": height,
            "class_count": class_count,
        }
    )
    for line in stdin:
        if not line.strip():
            continue
        try:
            request = json.loads(line)
            request_id = request.get("id")
            kind = request["type"]
            img = _decode(request)
            checksum = hashlib.sha256(img.tobytes()).hexdigest()
            if kind == "classify":
                if task != "classification":
                    emit({"type": "error", "id": request_id,
                          "message": f"classify request sent to {task} backend"})
                    continue
                classes, scores = classify_rule(img, class_count)
                emit({"type": "classification", "id": request_id,
                      "classes": classes, "scores": scores, "checksum": checksum})
            elif kind == "detect":
                if task != "detection":
                    emit({"type": "error", "id": request_id,
                          "message": f"detect request sent to {task} backend"})
                    continue
                boxes = detect_rule(
                    img, class_count,
                    int(request["original_width"]), int(request["original_height"]),
                )
                emit({"type": "detection", "id": request_id,
                      "boxes": boxes, "checksum": checksum})
            else:
                emit({"type": "error", "id": request_id,
                      "message": f"unknown request type {kind!r}"})
        except Exception as exc:  # malformed request: report, keep serving
            emit({"type": "error", "id": None, "message": f"bad request: {exc}"})


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description="deterministic stub inference backend")
    parser.add_argument("--task", choices=["classification", "detection"],
                        default="classification")
    parser.add_argument("--width", type=int, default=224)
    parser.add_argument("--height", type=int, default=224)
    parser.add_argument("--classes", type=int, default=None,
                        help="class count (default: 1000 classification, 80 detection)")
    parser.add_argument("--name", default="stub")
    args = parser.parse_args(argv)
    classes = args.classes if args.classes is not None else (
        1000 if args.task == "classification" else 80
    )
    serve(args.task, args.width, args.height, classes, args.name)
    return 0


if __name__ == "__main__":
    sys.exit(main())
