"""Workflow orchestration behind the CLI commands.

Each generate run persists its intermediates (plan.json, image.png,
typography.json, final.png) plus a manifest; a stage failure leaves earlier
artifacts in place and is recorded rather than erasing progress.
"""
from __future__ import annotations

import json
import logging
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from .config import ClientSet, PipelineConfig, build_clients
from .document import DesignDocument, parse_document
from .errors import DesignGenError, InputError, StageFailure
from .evaluation import evaluate_run, load_benchmark
from .fonts import FontCatalog
from .image import RasterImage
from .imagegen import WordEstimateCounter, generate_design_image
from .jsonx import canonical_json, compact_json
from .plan import (
    BUILTIN_EXEMPLARS,
    Intention,
    exemplar_to_dict,
    generate_design_plan,
    load_exemplar_store,
    serialize_plan,
)
from .raster import DirectoryAssets, render_final
from .reporting import write_eval_outputs
from .synthesis import ProgressJournal, build_exemplar_store, make_training_pair
from .typography import generate_typography, serialize_typography

log = logging.getLogger(__name__)


@dataclass
class RunManifest:
    intention: str
    seed: int
    artifacts: dict[str, str] = field(default_factory=dict)
    timings_s: dict[str, float] = field(default_factory=dict)
    client_calls: dict[str, int] = field(default_factory=dict)
    failed_stage: str | None = None
    error: str | None = None
    # The underlying exception, kept for callers; not serialized.
    exception: DesignGenError | None = None

    def to_dict(self) -> dict:
        return {
            "intention": self.intention,
            "seed": self.seed,
            "artifacts": self.artifacts,
            "timings_s": self.timings_s,
            "client_calls": self.client_calls,
            "failed_stage": self.failed_stage,
            "error": self.error,
        }


def _exemplar_store(config: PipelineConfig):
    if config.exemplar_store:
        return load_exemplar_store(config.exemplar_store)
    return list(BUILTIN_EXEMPLARS)


def run_generate(
    intention_text: str,
    config: PipelineConfig,
    clients: ClientSet,
    fonts: FontCatalog,
    out_dir: Path | str,
    seed: int | None = None,
) -> RunManifest:
    """intention -> plan -> image -> typography -> final design, persisting each stage."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    seed = config.seed if seed is None else seed
    manifest = RunManifest(intention=intention_text, seed=seed)

    def record(stage: str, filename: str, started: float) -> None:
        manifest.artifacts[stage] = filename
        manifest.timings_s[stage] = round(time.perf_counter() - started, 6)

    try:
        stage = "design_plan"
        started = time.perf_counter()
        try:
            intention = Intention(text=intention_text)
        except ValueError as e:
            raise InputError(str(e)) from e
        plan = generate_design_plan(
            clients.text, intention, _exemplar_store(config),
            seed=seed, max_retries=config.retries,
        )
        (out / "plan.json").write_text(serialize_plan(plan), "utf-8")
        record(stage, "plan.json", started)

        stage = "image"
        started = time.perf_counter()
        image = generate_design_image(
            clients.image, plan, WordEstimateCounter(),
            size=config.image_size, seed=seed, budget=config.token_budget,
        )
        image.save_png(out / "image.png")
        record(stage, "image.png", started)

        stage = "typography"
        started = time.perf_counter()
        spec = generate_typography(
            clients.multimodal, plan, image, config.canvas, fonts,
            seed=seed, max_retries=config.retries,
        )
        (out / "typography.json").write_text(serialize_typography(spec), "utf-8")
        record(stage, "typography.json", started)

        stage = "render"
        started = time.perf_counter()
        final = render_final(image, spec, config.canvas, fonts, wrap=config.wrap)
        final.save_png(out / "final.png")
        record(stage, "final.png", started)
    except DesignGenError as e:
        log.error("stage %s failed: %s", stage, e)
        manifest.failed_stage = stage
        manifest.error = str(e)
        manifest.exception = StageFailure(stage, e)

    manifest.client_calls = clients.recorder.snapshot()
    (out / "manifest.json").write_text(canonical_json(manifest.to_dict()), "utf-8")
    return manifest


def run_generate_batch(
    intentions: list[str],
    config: PipelineConfig,
    fonts: FontCatalog,
    out_dir: Path | str,
) -> list[RunManifest]:
    """One generate run per intention; item i runs with seed+i in item_{i:03d}/.

    Each item gets its own client set so per-manifest call counts stay exact.
    """
    out = Path(out_dir)

    def work(index: int) -> RunManifest:
        clients = build_clients(config, needed=("text", "image", "multimodal"))
        return run_generate(
            intentions[index], config, clients, fonts,
            out / f"item_{index:03d}", seed=config.seed + index,
        )

    with ThreadPoolExecutor(max_workers=max(1, config.max_in_flight)) as executor:
        return list(executor.map(work, range(len(intentions))))


def load_corpus(corpus_dir: Path | str) -> list[DesignDocument]:
    """All *.json documents under corpus_dir, sorted by filename."""
    corpus_path = Path(corpus_dir)
    if not corpus_path.is_dir():
        raise InputError(f"corpus directory not found: {corpus_dir}")
    docs = []
    for path in sorted(corpus_path.glob("*.json")):
        try:
            docs.append(parse_document(path.read_bytes()))
        except DesignGenError as e:
            raise InputError(f"{path.name}: {e}") from e
    if not docs:
        raise InputError(f"no documents in {corpus_dir}")
    seen: set[str] = set()
    for doc in docs:
        if doc.id in seen:
            raise InputError(f"duplicate document id in corpus: {doc.id}")
        seen.add(doc.id)
    return docs


def run_synth(
    corpus_dir: Path | str,
    config: PipelineConfig,
    clients: ClientSet,
    fonts: FontCatalog,
    out_dir: Path | str,
) -> dict:
    """Synthesize exemplars and training pairs from a document corpus; resumable."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    corpus = load_corpus(corpus_dir)
    assets = DirectoryAssets(Path(corpus_dir) / "assets")
    journal = ProgressJournal(out / "journal.jsonl")

    outcome = build_exemplar_store(
        corpus, clients.text, clients.multimodal, fonts, assets, journal,
        seed=config.seed, max_retries=config.retries, workers=config.max_in_flight,
    )

    with open(out / "exemplars.jsonl", "w", encoding="utf-8") as fh:
        for _, exemplar in outcome.exemplars:
            fh.write(compact_json(exemplar_to_dict(exemplar)) + "\n")

    plans = {doc_id: ex.plan for doc_id, ex in outcome.exemplars}
    pairs = []
    filtered = 0
    for doc in corpus:
        plan = plans.get(doc.id)
        if plan is None:
            continue
        pair = make_training_pair(
            doc, plan, fonts, assets,
            min_area_px=config.min_area_px, images_dir=out / "targets",
        )
        if pair is None:
            filtered += 1
        else:
            pairs.append(pair)
    with open(out / "pairs.jsonl", "w", encoding="utf-8") as fh:
        for pair in pairs:
            fh.write(
                compact_json(
                    {
                        "prompt_text": pair.prompt_text,
                        "target_image_ref": pair.target_image_ref,
                        "source_doc_id": pair.source_doc_id,
                    }
                )
                + "\n"
            )

    report = {
        "documents": len(corpus),
        "exemplars": len(outcome.exemplars),
        "pairs": len(pairs),
        "filtered": filtered,
        "failures": [
            {"doc_id": f.doc_id, "stage": f.stage, "error": f.error} for f in outcome.failures
        ],
        "stages_from_journal": outcome.stages_from_journal,
        "docs_fully_journaled": outcome.docs_fully_journaled,
        "client_calls": clients.recorder.snapshot(),
    }
    (out / "report.json").write_text(canonical_json(report), "utf-8")
    return report


def run_eval(
    benchmark_path: Path | str,
    images_dir: Path | str,
    config: PipelineConfig,
    clients: ClientSet,
    out_dir: Path | str,
) -> dict:
    """Judge generated designs against the benchmark and write report + figures."""
    benchmark = load_benchmark(benchmark_path)
    images_path = Path(images_dir)
    if not images_path.is_dir():
        raise InputError(f"images directory not found: {images_dir}")
    images: dict[str, RasterImage] = {}
    for prompt in benchmark:
        png = images_path / f"{prompt.id}.png"
        if png.is_file():
            images[prompt.id] = RasterImage.load_png(png)
    report = evaluate_run(
        clients.judge, benchmark, images,
        seed=config.seed, max_retries=config.retries, workers=config.max_in_flight,
    )
    paths = write_eval_outputs(report, out_dir)
    log.info("eval outputs: %s", json.dumps(paths))
    return {"report": report, "paths": paths}
