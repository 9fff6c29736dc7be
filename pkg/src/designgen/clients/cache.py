"""On-disk response cache keyed by (client kind, request hash)."""
from __future__ import annotations

import hashlib
import json
import threading
from pathlib import Path
from typing import Sequence

from ..image import RasterImage
from .base import SamplingParams


def _request_key(*parts: object) -> str:
    h = hashlib.sha256()
    for part in parts:
        h.update(repr(part).encode("utf-8"))
        h.update(b"\x1f")
    return h.hexdigest()


class ResponseCache:
    def __init__(self, directory):
        self._dir = Path(directory)
        self._dir.mkdir(parents=True, exist_ok=True)
        self._lock = threading.Lock()

    def _path(self, kind: str, key: str, suffix: str) -> Path:
        return self._dir / f"{kind}-{key}{suffix}"

    def get_text(self, kind: str, key: str) -> str | None:
        path = self._path(kind, key, ".json")
        with self._lock:
            if not path.is_file():
                return None
            return json.loads(path.read_text("utf-8"))["content"]

    def put_text(self, kind: str, key: str, content: str) -> None:
        path = self._path(kind, key, ".json")
        with self._lock:
            path.write_text(json.dumps({"content": content}), "utf-8")

    def get_png(self, kind: str, key: str) -> bytes | None:
        path = self._path(kind, key, ".png")
        with self._lock:
            if not path.is_file():
                return None
            return path.read_bytes()

    def put_png(self, kind: str, key: str, data: bytes) -> None:
        path = self._path(kind, key, ".png")
        with self._lock:
            path.write_bytes(data)


class CachedTextGen:
    def __init__(self, inner, cache: ResponseCache, kind: str = "text"):
        self._inner = inner
        self._cache = cache
        self._kind = kind

    def complete(self, prompt: str, sampling: SamplingParams) -> str:
        key = _request_key(prompt, sampling)
        hit = self._cache.get_text(self._kind, key)
        if hit is not None:
            return hit
        result = self._inner.complete(prompt, sampling)
        self._cache.put_text(self._kind, key, result)
        return result


class CachedMultimodal:
    def __init__(self, inner, cache: ResponseCache, kind: str = "multimodal"):
        self._inner = inner
        self._cache = cache
        self._kind = kind

    def complete(self, image: RasterImage, prompt: str, sampling: SamplingParams) -> str:
        key = _request_key(image.content_hash(), prompt, sampling)
        hit = self._cache.get_text(self._kind, key)
        if hit is not None:
            return hit
        result = self._inner.complete(image, prompt, sampling)
        self._cache.put_text(self._kind, key, result)
        return result


class CachedImageGen:
    def __init__(self, inner, cache: ResponseCache, kind: str = "image"):
        self._inner = inner
        self._cache = cache
        self._kind = kind

    def generate(
        self, prompt_chunks: Sequence[str], width_px: int, height_px: int, seed: int
    ) -> RasterImage:
        key = _request_key(tuple(prompt_chunks), width_px, height_px, seed)
        hit = self._cache.get_png(self._kind, key)
        if hit is not None:
            return RasterImage.from_png_bytes(hit)
        result = self._inner.generate(prompt_chunks, width_px, height_px, seed)
        self._cache.put_png(self._kind, key, result.to_png_bytes())
        return result
