"""Launcher: ``backend-ref --model FAMILY [--weights PATH]``.

Loads the pretrained model, then serves the stdio protocol until stdin
closes. Any load failure (missing weights file, missing optional
dependency, no way to fetch default checkpoints) exits nonzero before the
handshake, which the harness reports as backend-unavailable.
"""

from __future__ import annotations

import argparse
import sys

from .models import FAMILIES, get_spec, load_model
from .service import serve


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description="pretrained-model inference backend")
    parser.add_argument("--model", required=True, choices=sorted(FAMILIES),
                        help="model family to serve")
    parser.add_argument("--weights", default=None,
                        help="checkpoint path (default: the pretrained release)")
    args = parser.parse_args(argv)

    spec = get_spec(args.model)
    try:
        model = load_model(spec, args.weights)
    except Exception as exc:
        print(f"backend-ref: cannot load {args.model}: {exc}", file=sys.stderr)
        return 1

    meta = {"weights": args.weights or "pretrained-default", "preprocessing": "resize-only"}
    serve(spec, model, meta=meta)
    return 0


if __name__ == "__main__":
    sys.exit(main())
