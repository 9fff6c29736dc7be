"""Benchmark loading, judge scoring, and score aggregation.

A multimodal judge scores each generated design on five aspects from 1 to
10; aggregation averages per aspect, per category, and overall (the overall
mean is the mean of the five aspect means).
"""
from __future__ import annotations

import json
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from decimal import ROUND_HALF_UP, Decimal
from pathlib import Path

from .clients.base import MultimodalClient, SamplingParams
from .errors import EmptyInput, GenerationExhausted, InvalidScores, MalformedBenchmark, ModelOutputError
from .image import RasterImage
from .jsonx import extract_json_object
from .plan import Intention

log = logging.getLogger(__name__)

CATEGORIES = ("advertising", "events", "marketing", "posts", "covers_headers", "creative")

ASPECTS = (
    "design_layout",
    "content_relevance",
    "typography_color",
    "graphics_images",
    "innovation",
)

_ASPECT_LABELS = {
    "design_layout": "design and layout",
    "content_relevance": "content relevance",
    "typography_color": "typography and color",
    "graphics_images": "graphics and images",
    "innovation": "innovation",
}


@dataclass(frozen=True)
class BenchmarkPrompt:
    id: str
    category: str
    intention: Intention


@dataclass(frozen=True)
class AspectScores:
    design_layout: float
    content_relevance: float
    typography_color: float
    graphics_images: float
    innovation: float

    def as_dict(self) -> dict[str, float]:
        return {aspect: getattr(self, aspect) for aspect in ASPECTS}


@dataclass
class EvalReport:
    rows: list[tuple[BenchmarkPrompt, AspectScores]]
    aspect_means: dict[str, float]
    overall_mean: float
    category_means: dict[str, dict[str, float]]
    failures: list[dict] = field(default_factory=list)


def load_benchmark(path: Path | str) -> list[BenchmarkPrompt]:
    """Parse a JSON-lines benchmark file ({"id","category","intention"} per line)."""
    prompts: list[BenchmarkPrompt] = []
    seen: set[str] = set()
    with open(path, "r", encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, 1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as e:
                raise MalformedBenchmark(line_no, f"invalid JSON: {e}") from e
            if not isinstance(obj, dict):
                raise MalformedBenchmark(line_no, "expected an object")
            pid = obj.get("id")
            category = obj.get("category")
            intention = obj.get("intention")
            if not isinstance(pid, str) or not pid:
                raise MalformedBenchmark(line_no, "missing or invalid id")
            if pid in seen:
                raise MalformedBenchmark(line_no, f"duplicate id {pid!r}")
            if category not in CATEGORIES:
                raise MalformedBenchmark(line_no, f"unknown category {category!r}")
            if not isinstance(intention, str) or not intention.strip():
                raise MalformedBenchmark(line_no, "missing or empty intention")
            seen.add(pid)
            prompts.append(
                BenchmarkPrompt(id=pid, category=category, intention=Intention(text=intention))
            )
    return prompts


def build_judge_prompt(intention: Intention) -> str:
    """Deterministic scoring prompt naming the five aspects and the 1-10 scale."""
    aspect_lines = "\n".join(
        f'  "{key}": {label}' for key, label in _ASPECT_LABELS.items()
    )
    return (
        "You are judging a graphic design generated for this request:\n"
        f"REQUEST: {intention.text}\n\n"
        "Score the attached design image on each aspect from 1 (poor) to 10 (excellent):\n"
        f"{aspect_lines}\n\n"
        "Reply with a JSON object containing exactly those five keys and numeric scores, "
        "nothing else."
    )


def parse_scores(raw: str) -> AspectScores:
    """Extract the five aspect scores; values must be numbers in [1, 10]."""
    obj = extract_json_object(raw)
    values: dict[str, float] = {}
    for aspect in ASPECTS:
        if aspect not in obj:
            raise InvalidScores(f"missing key {aspect!r}")
        value = obj[aspect]
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise InvalidScores(f"{aspect} is not a number")
        value = float(value)
        if not 1.0 <= value <= 10.0:
            raise InvalidScores(f"{aspect} = {value} outside [1, 10]")
        values[aspect] = value
    return AspectScores(**values)


def round_display(value: float) -> str:
    """Round half up to one decimal, as scores are conventionally reported."""
    return str(Decimal(repr(value)).quantize(Decimal("0.1"), rounding=ROUND_HALF_UP))


def _mean(values: list[float]) -> float:
    return sum(values) / len(values)


def aggregate(rows: list[tuple[BenchmarkPrompt, AspectScores]]) -> EvalReport:
    """Per-aspect means, overall mean of aspect means, and per-category breakdowns."""
    if not rows:
        raise EmptyInput("no scored rows to aggregate")
    aspect_means = {
        aspect: _mean([scores.as_dict()[aspect] for _, scores in rows]) for aspect in ASPECTS
    }
    overall = _mean(list(aspect_means.values()))
    category_means: dict[str, dict[str, float]] = {}
    for category in CATEGORIES:
        subset = [scores for prompt, scores in rows if prompt.category == category]
        if not subset:
            continue
        means = {aspect: _mean([s.as_dict()[aspect] for s in subset]) for aspect in ASPECTS}
        means["overall"] = _mean([means[a] for a in ASPECTS])
        means["count"] = float(len(subset))
        category_means[category] = means
    return EvalReport(
        rows=list(rows),
        aspect_means=aspect_means,
        overall_mean=overall,
        category_means=category_means,
    )


def evaluate_run(
    client: MultimodalClient,
    benchmark: list[BenchmarkPrompt],
    images: dict[str, RasterImage],
    seed: int = 0,
    max_retries: int = 3,
    workers: int = 1,
) -> EvalReport:
    """Judge every benchmark prompt that has an image; failures become data."""
    sampling = SamplingParams()

    def judge(index: int):
        prompt = benchmark[index]
        image = images.get(prompt.id)
        if image is None:
            return prompt, None, "missing image"
        judge_prompt = build_judge_prompt(prompt.intention)
        last_error: Exception | None = None
        for attempt in range(max_retries):
            raw = client.complete(image, judge_prompt, sampling.with_seed(seed + attempt))
            try:
                return prompt, parse_scores(raw), None
            except ModelOutputError as e:
                last_error = e
        return prompt, None, str(GenerationExhausted(max_retries, last_error))

    with ThreadPoolExecutor(max_workers=max(1, workers)) as executor:
        outcomes = list(executor.map(judge, range(len(benchmark))))

    rows: list[tuple[BenchmarkPrompt, AspectScores]] = []
    failures: list[dict] = []
    for prompt, scores, error in outcomes:
        if scores is not None:
            rows.append((prompt, scores))
        else:
            failures.append({"id": prompt.id, "error": error})
            log.warning("judging failed for %s: %s", prompt.id, error)

    if rows:
        report = aggregate(rows)
    else:
        report = EvalReport(rows=[], aspect_means={}, overall_mean=float("nan"), category_means={})
    report.failures = failures
    return report


def report_to_dict(report: EvalReport) -> dict:
    return {
        "rows": [
            {"id": prompt.id, "category": prompt.category, "scores": scores.as_dict()}
            for prompt, scores in report.rows
        ],
        "aspect_means": report.aspect_means,
        "overall_mean": report.overall_mean if report.rows else None,
        "category_means": report.category_means,
        "failures": report.failures,
        "display": {
            "aspect_means": {a: round_display(v) for a, v in report.aspect_means.items()},
            "overall_mean": round_display(report.overall_mean) if report.rows else None,
        },
    }
