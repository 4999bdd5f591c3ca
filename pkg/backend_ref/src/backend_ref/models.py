"""Model families and adapters.

Each family fixes the task and handshake dimensions. Adapters reduce a
loaded model to the one call the service loop needs, which also keeps the
loop testable with fakes.

Deliberately, the only preprocessing is the resize the harness already
performed plus scaling levels to [0, 1]; the ecosystem's standard mean/std
normalization transforms are skipped. That marginally lowers baseline
accuracy but keeps the measurement pipeline resize-only end to end.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

TASK_CLASSIFICATION = "classification"
TASK_DETECTION = "detection"


@dataclass(frozen=True)
class ModelSpec:
    family: str
    task: str
    input_width: int
    input_height: int
    class_count: int


FAMILIES = {
    "resnet18": ModelSpec("resnet18", TASK_CLASSIFICATION, 224, 224, 1000),
    "resnet50": ModelSpec("resnet50", TASK_CLASSIFICATION, 224, 224, 1000),
    "resnet101": ModelSpec("resnet101", TASK_CLASSIFICATION, 224, 224, 1000),
    "googlenet": ModelSpec("googlenet", TASK_CLASSIFICATION, 224, 224, 1000),
    "vit": ModelSpec("vit", TASK_CLASSIFICATION, 224, 224, 1000),
    "yolo-n": ModelSpec("yolo-n", TASK_DETECTION, 640, 640, 80),
    "yolo-m": ModelSpec("yolo-m", TASK_DETECTION, 640, 640, 80),
}

# Default pretrained checkpoints for the YOLO families; any ultralytics
# weights file can be substituted with --weights (e.g. yolov5nu.pt).
YOLO_DEFAULT_WEIGHTS = {"yolo-n": "yolov8n.pt", "yolo-m": "yolov8m.pt"}


def get_spec(family: str) -> ModelSpec:
    try:
        return FAMILIES[family]
    except KeyError:
        raise ValueError(
            f"unknown model family {family!r}; choose from {', '.join(sorted(FAMILIES))}"
        ) from None


class TorchClassifier:
    """Classification adapter: uint8 HWC image in, raw logit vector out."""

    def __init__(self, module):
        import torch

        self._torch = torch
        self._module = module.eval()

    def logits(self, img: np.ndarray) -> np.ndarray:
        torch = self._torch
        with torch.inference_mode():
            batch = torch.from_numpy(img.copy()).permute(2, 0, 1).float().div(255.0)
            out = self._module(batch.unsqueeze(0))[0]
        return out.numpy()


class UltralyticsDetector:
    """Detection adapter: boxes in the coordinates of the image it is given."""

    def __init__(self, model):
        self._model = model

    def boxes(self, img: np.ndarray) -> list:
        from PIL import Image

        results = self._model.predict(Image.fromarray(img, "RGB"), verbose=False)
        out = []
        for box in results[0].boxes:
            x0, y0, x1, y1 = (float(v) for v in box.xyxy[0])
            out.append((int(box.cls[0]), float(box.conf[0]), x0, y0, x1 - x0, y1 - y0))
        return out


_TORCHVISION_BUILDERS = {
    "resnet18": ("resnet18", "ResNet18_Weights"),
    "resnet50": ("resnet50", "ResNet50_Weights"),
    "resnet101": ("resnet101", "ResNet101_Weights"),
    "googlenet": ("googlenet", "GoogLeNet_Weights"),
    "vit": ("vit_b_16", "ViT_B_16_Weights"),
}


def load_classifier(spec: ModelSpec, weights: str | None):
    import torch
    from torchvision import models as tv_models

    torch.manual_seed(0)
    builder_name, weights_enum_name = _TORCHVISION_BUILDERS[spec.family]
    builder = getattr(tv_models, builder_name)
    if weights:
        if not Path(weights).is_file():
            raise FileNotFoundError(f"weights file not found: {weights}")
        module = builder(weights=None)
        state = torch.load(weights, map_location="cpu", weights_only=True)
        module.load_state_dict(state)
    else:
        weights_enum = getattr(tv_models, weights_enum_name)
        module = builder(weights=weights_enum.DEFAULT)
    return TorchClassifier(module)


def load_detector(spec: ModelSpec, weights: str | None):
    try:
        from ultralytics import YOLO
    except ImportError as exc:
        raise RuntimeError(
            "YOLO families need the ultralytics package: pip install backend-ref[yolo]"
        ) from exc

    checkpoint = weights or YOLO_DEFAULT_WEIGHTS[spec.family]
    if weights and not Path(weights).is_file():
        raise FileNotFoundError(f"weights file not found: {weights}")
    return UltralyticsDetector(YOLO(checkpoint))


def load_model(spec: ModelSpec, weights: str | None = None):
    if spec.task == TASK_CLASSIFICATION:
        return load_classifier(spec, weights)
    return load_detector(spec, weights)
