"""Command-line entry point: classify, scale, train, bench and gen."""

from __future__ import annotations

import json
import logging
import sys
from pathlib import Path

import click

from . import bench as bench_mod
from . import synth
from .classifier import classify_raster
from .config import Config
from .methods import METHODS, scale_by_method
from .raster import Raster, RasterFormatError, load_image, save_image
from .sli import FIXED_TAU, OffsetTable
from .spectral import CorpusManifest, train_offsets

log = logging.getLogger("screenscale")

EXIT_INPUT = 2
EXIT_PROCESSING = 3

_existing = click.Path(exists=True, dir_okay=False, path_type=Path)


class InputError(click.ClickException):
    exit_code = EXIT_INPUT


class ProcessingError(click.ClickException):
    exit_code = EXIT_PROCESSING


def _load_config(config_path, offsets_path=None) -> Config:
    try:
        cfg = Config.load(config_path) if config_path else Config()
        if offsets_path:
            cfg = cfg.with_offsets(OffsetTable.load(offsets_path))
    except (OSError, ValueError, TypeError) as exc:
        raise InputError(f"bad configuration: {exc}") from None
    return cfg


def _read(path: Path):
    try:
        return load_image(path)
    except (OSError, RasterFormatError, ImportError) as exc:
        raise InputError(f"cannot read {path}: {exc}") from None


def _positive(ctx, param, value):
    values = value if isinstance(value, tuple) else (value,)
    for v in values:
        if v is not None and not v > 0:
            raise click.BadParameter("must be > 0")
    return value


config_option = click.option("--config", "config_path", type=_existing, help="JSON run configuration.")
offsets_option = click.option("--offsets", "offsets_path", type=_existing,
                              help="Offset table JSON; overrides the config.")


@click.group()
@click.option("-v", "--verbose", is_flag=True, help="Log progress to stderr.")
def main(verbose):
    """Content-adaptive scaling of screen images."""
    logging.basicConfig(level=logging.INFO if verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")


@main.command()
@click.argument("image", type=_existing)
@click.option("--out", "out", type=click.Path(dir_okay=False, path_type=Path), required=True,
              help="Block mask PGM (one pixel per block, text = 255).")
@click.option("--summary", type=click.Path(dir_okay=False, path_type=Path),
              help="JSON summary path [default: mask path with .json suffix].")
@config_option
def classify(image, out, summary, config_path):
    """Label the 16x16 blocks of IMAGE as text or pictorial."""
    cfg = _load_config(config_path)
    raster = _read(image)
    try:
        cmap = classify_raster(raster, cfg.classifier)
        save_image(cmap.mask_raster(), out)
        summary = summary or out.with_suffix(".json")
        summary.write_text(json.dumps(cmap.summary(cfg.classifier), indent=1) + "\n")
    except OSError as exc:
        raise ProcessingError(str(exc)) from None
    click.echo(cmap.major_type.label)


@main.command()
@click.argument("image", type=_existing)
@click.option("--factor", type=float, required=True, callback=_positive)
@click.option("--method", type=click.Choice(METHODS), default="adaptive", show_default=True)
@click.option("--tau", type=float, default=FIXED_TAU, show_default=True, help="Offset for sli-fixed.")
@click.option("--out", "out", type=click.Path(dir_okay=False, path_type=Path), required=True)
@config_option
@offsets_option
def scale(image, factor, method, tau, out, config_path, offsets_path):
    """Resize IMAGE by FACTOR."""
    cfg = _load_config(config_path, offsets_path)
    raster = _read(image)
    try:
        result = scale_by_method(method, raster, factor, cfg.offsets, cfg.classifier, fixed_tau=tau)
        save_image(result, out)
    except (OverflowError, ValueError) as exc:
        raise InputError(str(exc)) from None
    except OSError as exc:
        raise ProcessingError(str(exc)) from None
    log.info("%s: %dx%d -> %dx%d", method, raster.width, raster.height, result.width, result.height)


@main.command()
@click.argument("manifest", type=_existing)
@click.option("--out", "out", type=click.Path(dir_okay=False, path_type=Path), required=True,
              help="Offset table JSON; error curves are written beside it.")
@config_option
def train(manifest, out, config_path):
    """Fit per-class offsets to the labelled blocks listed in MANIFEST."""
    cfg = _load_config(config_path)
    try:
        corpus = CorpusManifest.load(manifest)
    except (OSError, ValueError) as exc:
        raise InputError(str(exc)) from None
    try:
        result = train_offsets(corpus, cfg.sweep)
    except (OSError, RasterFormatError) as exc:
        raise InputError(str(exc)) from None
    except ValueError as exc:
        raise ProcessingError(str(exc)) from None
    try:
        out.write_text(result.offsets.to_json() + "\n")
        for curve in result.curves.values():
            (out.parent / f"{out.stem}_{curve.name}.csv").write_text(curve.to_csv())
    except OSError as exc:
        raise ProcessingError(str(exc)) from None
    for name, curve in sorted(result.curves.items()):
        flag = "  (degenerate: minimum on the sweep boundary or flat curve)" if curve.degenerate else ""
        click.echo(f"{name}\t{curve.tau_star:.4f}{flag}")
    if result.degenerate:
        click.echo("warning: degenerate corpus, some offsets sit on the sweep boundary", err=True)


@main.command()
@click.argument("images", nargs=-1, required=True, type=_existing)
@click.option("--factor", "factors", type=float, multiple=True, default=(1.5,), show_default=True,
              callback=_positive)
@click.option("--method", "methods", type=click.Choice(METHODS), multiple=True,
              default=("bilinear", "bicubic", "sli-fixed", "adaptive"), show_default=True)
@click.option("--reference", type=click.Choice(METHODS), default="bicubic", show_default=True,
              help="Method whose output the PSNR column is measured against.")
@click.option("--runs", type=click.IntRange(min=bench_mod.MIN_RUNS), default=bench_mod.MIN_RUNS,
              show_default=True)
@click.option("--out", "out", type=click.Path(dir_okay=False, path_type=Path), required=True)
@config_option
@offsets_option
def bench(images, factors, methods, reference, runs, out, config_path, offsets_path):
    """Time every method on IMAGES and write a CSV report."""
    cfg = _load_config(config_path, offsets_path)
    rows = bench_mod.bench_files(images, factors, methods, runs, reference, cfg.offsets, cfg.classifier)
    try:
        bench_mod.write_csv(rows, out)
    except OSError as exc:
        raise ProcessingError(str(exc)) from None
    for row in rows:
        click.echo(f"{row.image}\t{row.method}\t{row.factor:g}\t{row.wall_ms} ms")
    if any(r.error for r in rows):
        sys.exit(EXIT_PROCESSING)


@main.command()
@click.option("--out", "out", type=click.Path(file_okay=False, path_type=Path), required=True,
              help="Output directory.")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--width", type=click.IntRange(min=16), default=1280, show_default=True)
@click.option("--height", type=click.IntRange(min=16), default=768, show_default=True)
@click.option("--blocks", type=click.IntRange(min=1), default=200, show_default=True,
              help="Corpus blocks per label.")
def gen(out, seed, width, height, blocks):
    """Write a synthetic screen, its ground-truth block labels and a training corpus."""
    try:
        out.mkdir(parents=True, exist_ok=True)
        comp = synth.screen(width, height, seed)
        save_image(comp.raster, out / "screen.ppm")
        truth = comp.truth.astype("uint8") * 255
        save_image(Raster(truth), out / "truth.pgm")
        small = synth.text_and_gradient(seed=seed)
        save_image(small.raster, out / "text_gradient.ppm")
        save_image(Raster(small.truth.astype("uint8") * 255), out / "text_gradient_truth.pgm")
        manifest, _ = synth.make_corpus(out / "corpus", seed, blocks, blocks)
    except OSError as exc:
        raise ProcessingError(str(exc)) from None
    click.echo(str(manifest))


if __name__ == "__main__":
    main()
