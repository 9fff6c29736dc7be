"""Command-line interface: generate, render, synth, eval.

Exit codes: 0 success, 2 input error, 3 stage failure, 4 backend failure.
"""
from __future__ import annotations

import logging
import sys
from pathlib import Path

import click

from . import pipeline
from .config import apply_overrides, build_clients, fonts_for, load_config, validate_for_command
from .document import Canvas
from .errors import EXIT_STAGE_FAILURE, DesignGenError, InputError
from .image import RasterImage
from .raster import render_final
from .typography import parse_typography


def _fail(error: DesignGenError) -> None:
    click.echo(f"error: {error}", err=True)
    sys.exit(error.exit_code)


def _parse_canvas(value: str | None, default: Canvas) -> Canvas:
    if value is None:
        return default
    try:
        w, h = value.lower().split("x")
        return Canvas(int(w), int(h))
    except (ValueError, TypeError):
        raise InputError(f"canvas must look like 1024x768, got {value!r}") from None


@click.group()
@click.option("--config", "config_path", type=click.Path(), default=None, help="JSON config file.")
@click.option("--mock/--live", "mock", default=None, help="Use deterministic offline backends.")
@click.option("--seed", type=int, default=None, help="Base seed for all stages.")
@click.option("--wrap/--no-wrap", "wrap", default=None, help="Word-wrap overflowing text lines.")
@click.option("--max-in-flight", type=int, default=None, help="Concurrent request cap.")
@click.option("--retries", type=int, default=None, help="Retries per model call.")
@click.option("-v", "--verbose", is_flag=True, help="Debug logging.")
@click.pass_context
def main(ctx, config_path, mock, seed, wrap, max_in_flight, retries, verbose):
    """Turn short design intentions into rendered graphic designs."""
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        config = load_config(config_path)
        config = apply_overrides(
            config, mock=mock, seed=seed, wrap=wrap,
            max_in_flight=max_in_flight, retries=retries,
        )
    except DesignGenError as e:
        _fail(e)
    ctx.obj = config


@main.command()
@click.argument("intention", required=False)
@click.option("--batch", type=click.Path(exists=True), default=None,
              help="File with one intention per line.")
@click.option("--out", type=click.Path(), default="out", help="Output directory.")
@click.option("--exemplars", type=click.Path(exists=True), default=None,
              help="Exemplar store (JSON lines) for few-shot prompting.")
@click.pass_obj
def generate(config, intention, batch, out, exemplars):
    """Generate design(s) from INTENTION or a --batch file."""
    try:
        config = apply_overrides(config, exemplar_store=exemplars)
        validate_for_command(config, ("text", "image", "multimodal"))
        fonts = fonts_for(config)
        if batch is not None:
            intentions = [
                line.strip() for line in Path(batch).read_text("utf-8").splitlines() if line.strip()
            ]
            if not intentions:
                raise InputError(f"no intentions in {batch}")
            manifests = pipeline.run_generate_batch(intentions, config, fonts, out)
        elif intention:
            clients = build_clients(config, needed=("text", "image", "multimodal"))
            manifests = [pipeline.run_generate(intention, config, clients, fonts, out)]
        else:
            raise InputError("provide an INTENTION argument or --batch FILE")
    except DesignGenError as e:
        _fail(e)

    failed = [m for m in manifests if m.failed_stage]
    for m in manifests:
        status = f"FAILED at {m.failed_stage}: {m.error}" if m.failed_stage else "ok"
        click.echo(f"{m.intention[:60]!r}: {status}")
    if failed:
        worst = max(f.exception.exit_code for f in failed if f.exception is not None)
        sys.exit(worst or EXIT_STAGE_FAILURE)


@main.command()
@click.option("--image", "image_path", type=click.Path(exists=True), required=True,
              help="Background image (PNG).")
@click.option("--typography", "typography_path", type=click.Path(exists=True), required=True,
              help="Typography JSON.")
@click.option("--canvas", "canvas_str", default=None, help="Canvas size WxH (default from config).")
@click.option("--out", type=click.Path(), default="final.png", help="Output PNG path.")
@click.pass_obj
def render(config, image_path, typography_path, canvas_str, out):
    """Render a final design from an image and a typography spec."""
    try:
        canvas = _parse_canvas(canvas_str, config.canvas)
        fonts = fonts_for(config)
        background = RasterImage.load_png(image_path)
        try:
            spec = parse_typography(Path(typography_path).read_text("utf-8"), canvas, fonts)
        except DesignGenError as e:
            raise InputError(f"{typography_path}: {e}") from e
        result = render_final(background, spec, canvas, fonts, wrap=config.wrap)
        result.save_png(out)
    except DesignGenError as e:
        _fail(e)
    click.echo(f"wrote {out}")


@main.command()
@click.option("--corpus", type=click.Path(exists=True), required=True,
              help="Directory of document JSON files (+ assets/).")
@click.option("--out", type=click.Path(), default="synth-out", help="Output directory.")
@click.pass_obj
def synth(config, corpus, out):
    """Build the exemplar dataset and training pairs from a document corpus."""
    try:
        validate_for_command(config, ("text", "multimodal"))
        fonts = fonts_for(config)
        clients = build_clients(config, needed=("text", "multimodal"))
        report = pipeline.run_synth(corpus, config, clients, fonts, out)
    except DesignGenError as e:
        _fail(e)
    click.echo(
        f"documents={report['documents']} exemplars={report['exemplars']} "
        f"pairs={report['pairs']} filtered={report['filtered']} "
        f"failures={len(report['failures'])}"
    )


@main.command(name="eval")
@click.option("--benchmark", type=click.Path(exists=True), required=True,
              help="Benchmark JSON-lines file.")
@click.option("--images", type=click.Path(exists=True), required=True,
              help="Directory of {id}.png design images.")
@click.option("--out", type=click.Path(), default="eval-out", help="Output directory.")
@click.pass_obj
def eval_cmd(config, benchmark, images, out):
    """Judge generated designs against a benchmark and aggregate scores."""
    try:
        validate_for_command(config, ("judge",))
        clients = build_clients(config, needed=("judge",))
        result = pipeline.run_eval(benchmark, images, config, clients, out)
    except DesignGenError as e:
        _fail(e)
    report = result["report"]
    if report.rows:
        from .evaluation import round_display

        click.echo(
            f"scored={len(report.rows)} failures={len(report.failures)} "
            f"overall={round_display(report.overall_mean)}"
        )
    else:
        click.echo(f"scored=0 failures={len(report.failures)}")


if __name__ == "__main__":
    main()
