"""Image prompt assembly and token-budget fitting.

Image backends cap prompt length (77 tokens is the common default), so the
caption text is either split into budget-sized chunks the backend can weight
together, or thinned by randomly dropping whole sentences.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Protocol

from .errors import UnsatisfiablePrompt
from .image import RasterImage
from .plan import DesignPlan
from .rng import SplitMix64

DEFAULT_TOKEN_BUDGET = 77

# A sentence ends at . ! or ? followed by whitespace; the delimiter stays.
_SENTENCE_SPLIT = re.compile(r"(?<=[.!?])\s+")


class TokenCounter(Protocol):
    def count(self, text: str) -> int: ...


class WordEstimateCounter:
    """Conservative proxy counter: whitespace words x 1.3, rounded up.

    Production deployments should plug in the backend's real tokenizer.
    """

    def __init__(self, ratio: float = 1.3):
        self.ratio = ratio

    def count(self, text: str) -> int:
        words = len(text.split())
        return math.ceil(words * self.ratio) if words else 0


def split_sentences(text: str) -> list[str]:
    stripped = text.strip()
    if not stripped:
        return []
    return [s for s in _SENTENCE_SPLIT.split(stripped) if s]


def assemble_image_prompt(plan: DesignPlan) -> str:
    """Background caption + object caption, whitespace-normalized."""
    return " ".join(f"{plan.captions.background} {plan.captions.objects}".split())


@dataclass(frozen=True)
class FitResult:
    chunks: tuple[str, ...]
    truncated: bool = False


def _fit_chunk(sentences: list[str], counter: TokenCounter, budget: int) -> FitResult:
    for s in sentences:
        if counter.count(s) > budget:
            raise UnsatisfiablePrompt(
                f"sentence exceeds token budget {budget}: {s[:80]!r}"
            )
    chunks: list[str] = []
    current = ""
    for s in sentences:
        candidate = s if not current else current + " " + s
        if not current or counter.count(candidate) <= budget:
            current = candidate
        else:
            chunks.append(current)
            current = s
    if current:
        chunks.append(current)
    return FitResult(chunks=tuple(chunks))


def _truncate_words(sentence: str, counter: TokenCounter, budget: int) -> str:
    words = sentence.split()
    while len(words) > 1 and counter.count(" ".join(words)) > budget:
        words.pop()
    return " ".join(words)


def _fit_drop(sentences: list[str], counter: TokenCounter, budget: int, seed: int) -> FitResult:
    rng = SplitMix64(seed)
    kept = list(sentences)
    while len(kept) > 1 and counter.count(" ".join(kept)) > budget:
        del kept[rng.below(len(kept))]
    text = " ".join(kept)
    if counter.count(text) > budget:
        return FitResult(chunks=(_truncate_words(text, counter, budget),), truncated=True)
    return FitResult(chunks=(text,))


def fit_prompt(
    prompt: str,
    counter: TokenCounter,
    budget: int = DEFAULT_TOKEN_BUDGET,
    mode: str = "chunk",
    seed: int = 0,
) -> FitResult:
    """Fit a prompt to the token budget.

    chunk: greedy left-to-right packing of whole sentences into the minimal
    number of chunks, each within budget. Raises UnsatisfiablePrompt if any
    single sentence cannot fit.

    drop: remove uniformly random whole sentences (order preserved,
    seed-deterministic) until within budget; a lone oversized sentence is
    word-truncated and flagged.
    """
    if budget < 1:
        raise ValueError("budget must be >= 1")
    sentences = split_sentences(prompt)
    if not sentences:
        return FitResult(chunks=("",))
    if counter.count(" ".join(sentences)) <= budget:
        return FitResult(chunks=(" ".join(sentences),))
    if mode == "chunk":
        return _fit_chunk(sentences, counter, budget)
    if mode == "drop":
        return _fit_drop(sentences, counter, budget, seed)
    raise ValueError(f"unknown fit mode: {mode}")


def generate_design_image(
    client,
    plan: DesignPlan,
    counter: TokenCounter | None = None,
    size: tuple[int, int] = (1024, 1024),
    seed: int = 0,
    budget: int = DEFAULT_TOKEN_BUDGET,
) -> RasterImage:
    """Chunk-fit the plan's caption prompt and request the image."""
    counter = counter or WordEstimateCounter()
    fit = fit_prompt(assemble_image_prompt(plan), counter, budget=budget, mode="chunk")
    width, height = size
    if width < 1 or height < 1:
        raise ValueError("image size must be positive")
    return client.generate(list(fit.chunks), width, height, seed)
