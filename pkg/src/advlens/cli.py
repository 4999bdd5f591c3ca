"""Command-line interface.

Subcommands: augment, enhance, stats, eval, matrix, report. Exit codes:
0 success, 1 usage error, 2 run error. The ``ADVLENS_BACKEND`` environment
variable supplies a default backend command for eval/matrix.
"""

from __future__ import annotations

import csv
import io
import json
import os
import sys
from pathlib import Path

import click

from .augment import AugmentKind, apply_augment
from .dataset import (
    load_classification_manifest,
    load_detection_manifest,
    subsample,
)
from .enhance import EnhanceKind, SsrConfig, apply_enhancement
from .errors import AdvlensError
from .image import IMAGE_SUFFIXES, load_image, save_png
from .metrics import PixelStatsAccumulator
from .runner import (
    delta_report,
    report_from_json_text,
    report_to_csv_text,
    report_to_json_text,
    run_matrix,
    write_report,
)

AUGMENT_NAMES = [kind.value for kind in AugmentKind]
ENHANCE_NAMES = [kind.value for kind in EnhanceKind]


def _parse_list(value, valid, what):
    names = [part.strip() for part in value.split(",") if part.strip()]
    if not names:
        raise click.BadParameter(f"empty {what} list")
    for name in names:
        if name not in valid:
            raise click.BadParameter(f"unknown {what} {name!r}; choose from {', '.join(valid)}")
    return names


def _iter_images(root: Path):
    for path in sorted(root.rglob("*")):
        if path.is_file() and path.suffix.lower() in IMAGE_SUFFIXES:
            yield path


def _load_manifest(dataset, annotations):
    if annotations:
        return load_detection_manifest(annotations, dataset)
    return load_classification_manifest(dataset)


def _resolve_backend(backend):
    backend = backend or os.environ.get("ADVLENS_BACKEND")
    if not backend:
        raise click.UsageError("no backend: pass --backend CMD or set ADVLENS_BACKEND")
    return backend


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        click.echo(text, nl=False)


@click.group()
def cli():
    """Adverse-image augmentation, enhancement, and model evaluation harness."""


@cli.command("augment")
@click.option("--kind", required=True, type=click.Choice(AUGMENT_NAMES))
@click.option("--in", "in_dir", required=True,
              type=click.Path(exists=True, file_okay=False, path_type=Path))
@click.option("--out", "out_dir", required=True, type=click.Path(path_type=Path))
def augment_cmd(kind, in_dir, out_dir):
    """Apply one augment to every image under --in, writing PNGs to --out."""
    count = 0
    for path in _iter_images(in_dir):
        result = apply_augment(load_image(path), kind)
        save_png(result, out_dir / path.relative_to(in_dir).with_suffix(".png"))
        count += 1
    if count == 0:
        raise click.UsageError(f"no images found under {in_dir}")
    click.echo(f"augmented {count} images with {kind}")


@cli.command("enhance")
@click.option("--kind", required=True, type=click.Choice(["he", "rx"]))
@click.option("--sigma", type=float, default=100.0, show_default=True,
              help="Gaussian surround scale for rx")
@click.option("--in", "in_dir", required=True,
              type=click.Path(exists=True, file_okay=False, path_type=Path))
@click.option("--out", "out_dir", required=True, type=click.Path(path_type=Path))
def enhance_cmd(kind, sigma, in_dir, out_dir):
    """Apply HE or RX to every image under --in, writing PNGs to --out."""
    cfg = SsrConfig(sigma=sigma)
    count = 0
    for path in _iter_images(in_dir):
        result = apply_enhancement(load_image(path), kind, cfg)
        save_png(result, out_dir / path.relative_to(in_dir).with_suffix(".png"))
        count += 1
    if count == 0:
        raise click.UsageError(f"no images found under {in_dir}")
    click.echo(f"enhanced {count} images with {kind}")


@cli.command("stats")
@click.option("--dataset", required=True,
              type=click.Path(exists=True, file_okay=False, path_type=Path))
@click.option("--augments", default=",".join(AUGMENT_NAMES), show_default=True)
@click.option("--enhancements", default=",".join(ENHANCE_NAMES), show_default=True)
@click.option("--sigma", type=float, default=100.0, show_default=True)
@click.option("--out", type=click.Path())
@click.option("--format", "fmt", type=click.Choice(["csv", "json"]), default="csv",
              show_default=True)
@click.option("--limit", type=int, default=None, help="subsample to N images")
@click.option("--seed", type=int, default=0, show_default=True)
def stats_cmd(dataset, augments, enhancements, sigma, out, fmt, limit, seed):
    """Pooled pixel mean/std per augment x enhancement condition."""
    augment_names = _parse_list(augments, AUGMENT_NAMES, "augment")
    enhance_names = _parse_list(enhancements, ENHANCE_NAMES, "enhancement")
    paths = list(_iter_images(dataset))
    if not paths:
        raise click.UsageError(f"no images found under {dataset}")
    if limit is not None and limit < len(paths):
        import numpy as np

        rng = np.random.default_rng(seed)
        picked = sorted(rng.choice(len(paths), size=limit, replace=False))
        paths = [paths[i] for i in picked]

    cfg = SsrConfig(sigma=sigma)
    rows = []
    for augment in augment_names:
        for enhancement in enhance_names:
            acc = PixelStatsAccumulator()
            for path in paths:
                img = apply_enhancement(apply_augment(load_image(path), augment),
                                        enhancement, cfg)
                acc.add_image(img)
            stats = acc.result()
            rows.append({
                "augment": augment,
                "enhancement": enhancement,
                "mean": stats.mean,
                "std": stats.std,
                "images": len(paths),
                "subpixels": acc.count,
            })

    if fmt == "json":
        text = json.dumps({"rows": rows}, indent=2, sort_keys=True) + "\n"
    else:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["augment", "enhancement", "mean", "std", "images", "subpixels"])
        for row in rows:
            writer.writerow([row["augment"], row["enhancement"], repr(row["mean"]),
                             repr(row["std"]), row["images"], row["subpixels"]])
        text = buf.getvalue()
    _emit(text, out)


def _run_grid(dataset, annotations, backend, augment_names, enhance_names, sigma,
              workers, limit, seed, model):
    manifest = _load_manifest(dataset, annotations)
    if limit is not None:
        manifest = subsample(manifest, limit, seed)
    return run_matrix(
        manifest,
        _resolve_backend(backend),
        augments=augment_names,
        enhancements=enhance_names,
        ssr=SsrConfig(sigma=sigma),
        workers=workers,
        model_id=model,
    )


_GRID_OPTIONS = [
    click.option("--dataset", required=True, type=click.Path(exists=True, path_type=Path)),
    click.option("--annotations", type=click.Path(exists=True, dir_okay=False, path_type=Path),
                 help="COCO-style annotation file; selects the detection task"),
    click.option("--backend", help="backend command (default: $ADVLENS_BACKEND)"),
    click.option("--sigma", type=float, default=100.0, show_default=True),
    click.option("--out", type=click.Path()),
    click.option("--format", "fmt", type=click.Choice(["csv", "json"]), default="json",
                 show_default=True),
    click.option("--workers", type=int, default=1, show_default=True),
    click.option("--limit", type=int, default=None, help="subsample to N samples"),
    click.option("--seed", type=int, default=0, show_default=True,
                 help="seed for corpus subsampling only"),
    click.option("--model", default=None, help="model id recorded in the report"),
]


def _grid_options(fn):
    for option in reversed(_GRID_OPTIONS):
        fn = option(fn)
    return fn


@cli.command("eval")
@_grid_options
@click.option("--augments", default=AugmentKind.IDENTITY.value, show_default=True,
              help="exactly one augment")
@click.option("--enhancements", default=EnhanceKind.NONE.value, show_default=True,
              help="exactly one enhancement")
def eval_cmd(dataset, annotations, backend, sigma, out, fmt, workers, limit, seed,
             model, augments, enhancements):
    """Evaluate a single augment x enhancement cell."""
    augment_names = _parse_list(augments, AUGMENT_NAMES, "augment")
    enhance_names = _parse_list(enhancements, ENHANCE_NAMES, "enhancement")
    if len(augment_names) != 1 or len(enhance_names) != 1:
        raise click.UsageError("eval takes exactly one augment and one enhancement")
    report = _run_grid(dataset, annotations, backend, augment_names, enhance_names,
                       sigma, workers, limit, seed, model)
    cell = report.cells[0]
    if cell.error is not None:
        raise AdvlensError(f"cell failed: {cell.error}")
    click.echo(f"{report.model} {cell.augment}+{cell.enhancement} {cell.metric} = {cell.value}")
    if out:
        write_report(report, out, fmt)


@cli.command("matrix")
@_grid_options
@click.option("--augments", default=",".join(AUGMENT_NAMES), show_default=True)
@click.option("--enhancements", default=",".join(ENHANCE_NAMES), show_default=True)
def matrix_cmd(dataset, annotations, backend, sigma, out, fmt, workers, limit, seed,
               model, augments, enhancements):
    """Run the full augment x enhancement grid and save a matrix report."""
    augment_names = _parse_list(augments, AUGMENT_NAMES, "augment")
    enhance_names = _parse_list(enhancements, ENHANCE_NAMES, "enhancement")
    report = _run_grid(dataset, annotations, backend, augment_names, enhance_names,
                       sigma, workers, limit, seed, model)
    failed = sum(1 for c in report.cells if c.error is not None)
    click.echo(
        f"{report.model}: {len(report.cells)} cells "
        f"({failed} failed), {len(report.deltas)} delta rows",
        err=True,
    )
    text = report_to_json_text(report) if fmt == "json" else report_to_csv_text(report)
    _emit(text, out)


@cli.command("report")
@click.argument("reports", nargs=-1, required=True,
                type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option("--average", default=None, metavar="NAME",
              help="also emit deltas averaged across all given reports, as model NAME")
@click.option("--out", type=click.Path())
@click.option("--format", "fmt", type=click.Choice(["csv", "json"]), default="csv",
              show_default=True)
def report_cmd(reports, average, out, fmt):
    """Delta table (percentage points) from saved matrix report JSON files."""
    tables = []
    for path in reports:
        loaded = report_from_json_text(Path(path).read_text(encoding="utf-8"))
        tables.append((loaded, delta_report(loaded)))

    rows = []
    for loaded, deltas in tables:
        for row in deltas:
            rows.append({"model": loaded.model, "augment": row.augment,
                         "enhancement": row.enhancement, "metric": f"{loaded.metric}_delta_pp",
                         "value": row.delta_points})
    if average:
        keys = [(r.augment, r.enhancement) for r in tables[0][1]]
        for augment, enhancement in keys:
            values = [
                row.delta_points
                for _, deltas in tables
                for row in deltas
                if (row.augment, row.enhancement) == (augment, enhancement)
                and row.delta_points is not None
            ]
            rows.append({
                "model": average, "augment": augment, "enhancement": enhancement,
                "metric": "delta_pp_mean",
                "value": round(sum(values) / len(values), 10) if values else None,
            })

    if fmt == "json":
        text = json.dumps({"deltas": rows}, indent=2, sort_keys=True) + "\n"
    else:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["model", "augment", "enhancement", "metric", "value"])
        for row in rows:
            writer.writerow([row["model"], row["augment"], row["enhancement"], row["metric"],
                             "" if row["value"] is None else repr(row["value"])])
        text = buf.getvalue()
    _emit(text, out)


def main(argv=None) -> int:
    """Entry point mapping exceptions to the documented exit codes."""
    try:
        cli.main(args=argv, standalone_mode=False)
    except click.UsageError as exc:
        exc.show(file=sys.stderr)
        return 1
    except click.ClickException as exc:
        exc.show()
        return 1
    except click.exceptions.Abort:
        return 130
    except AdvlensError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
