import base64
import io
import json

import numpy as np
from PIL import Image

from backend_ref.models import ModelSpec
from backend_ref.service import serve


class FakeClassifier:
    def logits(self, img):
        # deterministic function of the pixels: per-channel means, then ramp
        means = img.reshape(-1, 3).mean(axis=0)
        return np.concatenate([means, np.arange(7.0)[::-1]])


class FakeDetector:
    def boxes(self, img):
        h, w = img.shape[:2]
        return [(3, 0.75, 0.0, 0.0, w / 2.0, h / 2.0)]


CLS_SPEC = ModelSpec("fake-cls", "classification", 32, 32, 10)
DET_SPEC = ModelSpec("fake-det", "detection", 32, 32, 80)


def _png_b64(img):
    buf = io.BytesIO()
    Image.fromarray(img, "RGB").save(buf, format="PNG")
    return base64.b64encode(buf.getvalue()).decode("ascii")


def _serve_lines(spec, model, requests, meta=None):
    stdin = io.StringIO("".join(json.dumps(r) + "\n" for r in requests))
    stdout = io.StringIO()
    serve(spec, model, meta=meta, stdin=stdin, stdout=stdout)
    return [json.loads(line) for line in stdout.getvalue().splitlines()]


def _request(kind, request_id, img, ow=32, oh=32):
    return {"type": kind, "id": request_id, "image_png": _png_b64(img),
            "original_width": ow, "original_height": oh}


class TestHandshake:
    def test_declares_spec_and_meta(self):
        records = _serve_lines(CLS_SPEC, FakeClassifier(), [], meta={"weights": "w.pt"})
        hs = records[0]
        assert hs["type"] == "handshake"
        assert hs["name"] == "fake-cls"
        assert hs["task"] == "classification"
        assert (hs["input_width"], hs["input_height"]) == (32, 32)
        assert hs["class_count"] == 10
        assert hs["meta"] == {"weights": "w.pt"}


class TestClassification:
    def test_response_ranked_by_raw_logits(self, tmp_path=None):
        img = np.full((32, 32, 3), 200, dtype=np.uint8)
        records = _serve_lines(CLS_SPEC, FakeClassifier(), [_request("classify", 0, img)])
        resp = records[1]
        assert resp["type"] == "classification"
        assert resp["id"] == 0
        assert len(resp["classes"]) == 5
        # channel means are 200 each, so classes 0,1,2 lead; then the ramp
        assert resp["classes"][:3] == [0, 1, 2]
        assert resp["scores"][0] == 200.0

    def test_identical_request_twice_identical_response(self):
        rng = np.random.default_rng(5)
        img = rng.integers(0, 256, (32, 32, 3), dtype=np.uint8)
        requests = [_request("classify", 0, img), _request("classify", 1, img)]
        records = _serve_lines(CLS_SPEC, FakeClassifier(), requests)
        assert records[1]["classes"] == records[2]["classes"]
        assert records[1]["scores"] == records[2]["scores"]

    def test_detect_request_rejected(self):
        img = np.zeros((32, 32, 3), dtype=np.uint8)
        records = _serve_lines(CLS_SPEC, FakeClassifier(), [_request("detect", 4, img)])
        assert records[1]["type"] == "error"
        assert records[1]["id"] == 4
        assert "classification" in records[1]["message"]


class TestDetection:
    def test_boxes_scaled_to_original(self):
        img = np.zeros((32, 32, 3), dtype=np.uint8)
        records = _serve_lines(DET_SPEC, FakeDetector(),
                               [_request("detect", 0, img, ow=64, oh=128)])
        box = records[1]["boxes"][0]
        assert records[1]["type"] == "detection"
        assert box["class"] == 3
        assert box["confidence"] == 0.75
        assert (box["width"], box["height"]) == (32.0, 64.0)

    def test_classify_request_rejected(self):
        img = np.zeros((32, 32, 3), dtype=np.uint8)
        records = _serve_lines(DET_SPEC, FakeDetector(), [_request("classify", 2, img)])
        assert records[1]["type"] == "error"


class TestRobustness:
    def test_malformed_request_keeps_serving(self):
        img = np.zeros((32, 32, 3), dtype=np.uint8)
        stdin = io.StringIO("this is not json\n" + json.dumps(_request("classify", 1, img)) + "\n")
        stdout = io.StringIO()
        serve(CLS_SPEC, FakeClassifier(), stdin=stdin, stdout=stdout)
        records = [json.loads(line) for line in stdout.getvalue().splitlines()]
        assert records[1]["type"] == "error"
        assert records[2]["type"] == "classification"

    def test_missing_image_field_reports_error_with_id(self):
        records = _serve_lines(CLS_SPEC, FakeClassifier(), [{"type": "classify", "id": 9}])
        assert records[1]["type"] == "error"
        assert records[1]["id"] == 9
