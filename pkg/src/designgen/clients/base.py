"""Client contracts for the three model services, plus call accounting."""
from __future__ import annotations

import threading
from dataclasses import dataclass, replace
from typing import Protocol, Sequence, runtime_checkable

from ..image import RasterImage


@dataclass(frozen=True)
class SamplingParams:
    temperature: float = 0.7
    seed: int = 0
    max_tokens: int = 1024

    def with_seed(self, seed: int) -> "SamplingParams":
        return replace(self, seed=seed)


@runtime_checkable
class TextGenClient(Protocol):
    def complete(self, prompt: str, sampling: SamplingParams) -> str: ...


@runtime_checkable
class ImageGenClient(Protocol):
    def generate(
        self, prompt_chunks: Sequence[str], width_px: int, height_px: int, seed: int
    ) -> RasterImage: ...


@runtime_checkable
class MultimodalClient(Protocol):
    def complete(self, image: RasterImage, prompt: str, sampling: SamplingParams) -> str: ...


class CallRecorder:
    """Thread-safe per-kind call counters; network calls tracked separately."""

    def __init__(self):
        self._lock = threading.Lock()
        self._counts: dict[str, int] = {}
        self._network = 0

    def record(self, kind: str, network: bool) -> None:
        with self._lock:
            self._counts[kind] = self._counts.get(kind, 0) + 1
            if network:
                self._network += 1

    @property
    def network_calls(self) -> int:
        with self._lock:
            return self._network

    def count(self, kind: str) -> int:
        with self._lock:
            return self._counts.get(kind, 0)

    @property
    def total_calls(self) -> int:
        with self._lock:
            return sum(self._counts.values())

    def snapshot(self) -> dict[str, int]:
        with self._lock:
            snap = dict(self._counts)
            snap["network"] = self._network
            return snap
