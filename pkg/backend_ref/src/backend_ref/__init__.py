"""Reference inference backend speaking the advlens stdio protocol.

Wraps pretrained torchvision classifiers (Resnet-18/50/101, GoogLeNet, a
ViT) and ultralytics YOLO detectors behind the line-delimited JSON protocol,
so the evaluation harness can drive real models as child processes.
"""

__version__ = "0.1.0"
