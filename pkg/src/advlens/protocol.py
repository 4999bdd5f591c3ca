"""Line-delimited JSON protocol between the harness and inference backends.

A backend is a child process speaking newline-delimited JSON over
stdin/stdout. It announces itself first, then answers requests in lockstep
(one outstanding request, responses in order):

handshake (backend -> harness, unprompted, one line)::

    {"type": "handshake", "name": str, "task": "classification"|"detection",
     "input_width": int, "input_height": int, "class_count": int,
     "meta": {...}}                                      # meta optional

request (harness -> backend; image already resized to the handshake dims)::

    {"type": "classify"|"detect", "id": int, "image_png": base64 str,
     "original_width": int, "original_height": int}

classification response::

    {"type": "classification", "id": int, "classes": [int, >= 5 of them],
     "scores": [float, same length]}

detection response (boxes in ORIGINAL image coordinates)::

    {"type": "detection", "id": int, "boxes": [{"class": int,
     "confidence": float, "x": float, "y": float,
     "width": float, "height": float}]}

error response: ``{"type": "error", "id": int, "message": str}``. Unknown
extra fields are ignored everywhere. Closing the backend's stdin asks it to
exit. Parallelism comes from running several backend processes, one per
worker, never from pipelining a single connection.
"""

from __future__ import annotations

import base64
import json
import selectors
import shlex
import subprocess
import sys
import time
from dataclasses import dataclass, field

import numpy as np

from .errors import BackendUnavailableError, ProtocolError
from .image import encode_png_bytes
from .metrics import Box

HANDSHAKE_TIMEOUT_S = 30.0

# Command line for the built-in deterministic stub backend.
STUB_COMMAND = [sys.executable, "-m", "advlens.stub_backend"]


@dataclass(frozen=True)
class BackendHandshake:
    name: str
    task: str
    input_width: int
    input_height: int
    class_count: int
    meta: dict = field(default_factory=dict)


@dataclass(frozen=True)
class PredictedBox:
    class_id: int
    confidence: float
    box: Box


def parse_handshake(record: dict) -> BackendHandshake:
    """Validate a handshake record."""
    try:
        if record["type"] != "handshake":
            raise ProtocolError(f"expected handshake, got {record!r}")
        hs = BackendHandshake(
            name=str(record["name"]),
            task=str(record["task"]),
            input_width=int(record["input_width"]),
            input_height=int(record["input_height"]),
            class_count=int(record["class_count"]),
            meta=dict(record.get("meta", {})),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ProtocolError(f"malformed handshake: {record!r}") from exc
    if hs.input_width < 1 or hs.input_height < 1:
        raise ProtocolError(f"handshake declares non-positive dimensions: {record!r}")
    if hs.task not in ("classification", "detection"):
        raise ProtocolError(f"handshake declares unknown task: {hs.task!r}")
    return hs


class BackendSession:
    """One connected backend child process, lockstep request/response."""

    def __init__(self, command: str | list[str], handshake_timeout: float = HANDSHAKE_TIMEOUT_S):
        if isinstance(command, str):
            command = shlex.split(command)
        self.command = list(command)
        self._next_id = 0
        try:
            self._proc = subprocess.Popen(
                self.command,
                stdin=subprocess.PIPE,
                stdout=subprocess.PIPE,
                text=True,
                bufsize=1,
            )
        except OSError as exc:
            raise BackendUnavailableError(f"cannot start backend {self.command}: {exc}") from exc
        line = self._read_line(timeout=handshake_timeout)
        if line is None:
            self.close()
            raise BackendUnavailableError(
                f"backend {self.command} did not complete handshake within "
                f"{handshake_timeout:.0f}s"
            )
        self.handshake = parse_handshake(self._parse_json(line))

    # -- low-level I/O ----------------------------------------------------

    def _read_line(self, timeout: float | None = None) -> str | None:
        if timeout is None:
            line = self._proc.stdout.readline()
            return line if line else None
        sel = selectors.DefaultSelector()
        sel.register(self._proc.stdout, selectors.EVENT_READ)
        deadline = time.monotonic() + timeout
        try:
            while True:
                remaining = deadline - time.monotonic()
                if remaining <= 0:
                    return None
                if sel.select(timeout=remaining):
                    line = self._proc.stdout.readline()
                    return line if line else None
        finally:
            sel.close()

    @staticmethod
    def _parse_json(line: str) -> dict:
        try:
            record = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ProtocolError(f"backend sent invalid JSON: {line!r}") from exc
        if not isinstance(record, dict):
            raise ProtocolError(f"backend sent non-object payload: {line!r}")
        return record

    def _roundtrip(self, request: dict) -> dict:
        request_id = self._next_id
        self._next_id += 1
        request["id"] = request_id
        try:
            self._proc.stdin.write(json.dumps(request) + "\n")
            self._proc.stdin.flush()
        except (BrokenPipeError, OSError) as exc:
            raise ProtocolError(f"backend {self.command} pipe closed: {exc}") from exc
        line = self._read_line()
        if line is None:
            raise ProtocolError(f"backend {self.command} closed the connection mid-run")
        record = self._parse_json(line)
        if record.get("type") == "error":
            raise ProtocolError(f"backend error: {record.get('message', '')!r}")
        if record.get("id") != request_id:
            raise ProtocolError(
                f"lockstep violation: sent id {request_id}, got {record.get('id')!r}"
            )
        return record

    # -- request helpers ----------------------------------------------------

    def _image_payload(self, img: np.ndarray, original_w: int, original_h: int) -> dict:
        return {
            "image_png": base64.b64encode(encode_png_bytes(img)).decode("ascii"),
            "original_width": original_w,
            "original_height": original_h,
        }

    def classify(self, img: np.ndarray, original_w: int, original_h: int) -> list:
        """Rank classes for one image; returns [(class_id, score), ...], best first."""
        if self.handshake.task != "classification":
            raise ProtocolError(
                f"classify sent to a {self.handshake.task} backend ({self.handshake.name})"
            )
        request = {"type": "classify", **self._image_payload(img, original_w, original_h)}
        record = self._roundtrip(request)
        try:
            if record["type"] != "classification":
                raise ProtocolError(f"expected classification response, got {record!r}")
            classes = [int(c) for c in record["classes"]]
            scores = [float(s) for s in record["scores"]]
        except (KeyError, TypeError, ValueError) as exc:
            raise ProtocolError(f"malformed classification response: {record!r}") from exc
        if len(classes) < 5 or len(classes) != len(scores):
            raise ProtocolError(f"classification response needs >= 5 ranked classes: {record!r}")
        return list(zip(classes, scores))

    def detect(self, img: np.ndarray, original_w: int, original_h: int) -> list:
        """Detect objects in one image; boxes come back in original coordinates."""
        if self.handshake.task != "detection":
            raise ProtocolError(
                f"detect sent to a {self.handshake.task} backend ({self.handshake.name})"
            )
        request = {"type": "detect", **self._image_payload(img, original_w, original_h)}
        record = self._roundtrip(request)
        try:
            if record["type"] != "detection":
                raise ProtocolError(f"expected detection response, got {record!r}")
            boxes = [
                PredictedBox(
                    class_id=int(b["class"]),
                    confidence=float(b["confidence"]),
                    box=Box(float(b["x"]), float(b["y"]), float(b["width"]), float(b["height"])),
                )
                for b in record["boxes"]
            ]
        except (KeyError, TypeError, ValueError) as exc:
            raise ProtocolError(f"malformed detection response: {record!r}") from exc
        return boxes

    # -- lifecycle ----------------------------------------------------------

    def alive(self) -> bool:
        return self._proc.poll() is None

    def close(self) -> None:
        if self._proc.stdin and not self._proc.stdin.closed:
            try:
                self._proc.stdin.close()
            except OSError:
                pass
        try:
            self._proc.wait(timeout=5)
        except subprocess.TimeoutExpired:
            self._proc.kill()
            self._proc.wait()

    def __enter__(self) -> "BackendSession":
        return self

    def __exit__(self, *exc) -> None:
        self.close()
