"""HTTP backends: chat-completions-style text/multimodal services and a
PNG-returning image-generation endpoint.

All clients share retry-with-backoff on transport errors and 5xx responses,
bearer auth from an environment variable, and a per-client in-flight cap.
"""
from __future__ import annotations

import base64
import os
import threading
import time
from typing import Sequence

import httpx

from ..errors import BackendFailure, ConfigError
from ..image import RasterImage
from .base import CallRecorder, SamplingParams

_RETRYABLE_STATUS = frozenset({500, 502, 503, 504, 429})


class _HttpService:
    def __init__(
        self,
        kind: str,
        base_url: str,
        model: str = "",
        auth_env: str | None = None,
        timeout: float = 60.0,
        retries: int = 3,
        backoff_s: float = 0.5,
        max_in_flight: int = 4,
        recorder: CallRecorder | None = None,
        transport: httpx.BaseTransport | None = None,
    ):
        if not base_url:
            raise ConfigError(f"{kind} service requires a base URL")
        self.kind = kind
        self.model = model
        self._retries = max(1, retries)
        self._backoff_s = backoff_s
        self._recorder = recorder
        self._semaphore = threading.Semaphore(max(1, max_in_flight))
        headers = {}
        if auth_env:
            token = os.environ.get(auth_env)
            if not token:
                raise ConfigError(f"auth environment variable {auth_env} is not set")
            headers["Authorization"] = f"Bearer {token}"
        self._client = httpx.Client(
            base_url=base_url, headers=headers, timeout=timeout, transport=transport
        )

    def _post(self, path: str, payload: dict) -> httpx.Response:
        last: Exception | None = None
        for attempt in range(self._retries):
            if self._recorder:
                self._recorder.record(self.kind, network=True)
            try:
                with self._semaphore:
                    resp = self._client.post(path, json=payload)
            except httpx.HTTPError as e:
                last = e
            else:
                if resp.status_code < 400:
                    return resp
                if resp.status_code not in _RETRYABLE_STATUS:
                    raise BackendFailure(
                        f"{self.kind} {path} returned {resp.status_code}: {resp.text[:200]}"
                    )
                last = BackendFailure(f"{self.kind} {path} returned {resp.status_code}")
            if attempt + 1 < self._retries and self._backoff_s > 0:
                time.sleep(self._backoff_s * (2**attempt))
        raise BackendFailure(f"{self.kind} {path} failed after {self._retries} attempt(s)", last)

    def close(self) -> None:
        self._client.close()


def _chat_content(resp: httpx.Response, kind: str) -> str:
    try:
        return resp.json()["choices"][0]["message"]["content"]
    except (KeyError, IndexError, TypeError, ValueError) as e:
        raise BackendFailure(f"{kind} reply missing choices[0].message.content", e) from e


class HttpTextGen(_HttpService):
    def __init__(self, base_url: str, model: str, **kwargs):
        super().__init__("text", base_url, model=model, **kwargs)

    def complete(self, prompt: str, sampling: SamplingParams) -> str:
        payload = {
            "model": self.model,
            "messages": [{"role": "user", "content": prompt}],
            "temperature": sampling.temperature,
            "seed": sampling.seed,
            "max_tokens": sampling.max_tokens,
        }
        return _chat_content(self._post("/v1/chat/completions", payload), self.kind)


class HttpMultimodal(_HttpService):
    def __init__(self, base_url: str, model: str, kind: str = "multimodal", **kwargs):
        super().__init__(kind, base_url, model=model, **kwargs)

    def complete(self, image: RasterImage, prompt: str, sampling: SamplingParams) -> str:
        b64 = base64.b64encode(image.to_png_bytes()).decode("ascii")
        payload = {
            "model": self.model,
            "messages": [
                {
                    "role": "user",
                    "content": [
                        {"type": "text", "text": prompt},
                        {
                            "type": "image_url",
                            "image_url": {"url": f"data:image/png;base64,{b64}"},
                        },
                    ],
                }
            ],
            "temperature": sampling.temperature,
            "seed": sampling.seed,
            "max_tokens": sampling.max_tokens,
        }
        return _chat_content(self._post("/v1/chat/completions", payload), self.kind)


class HttpImageGen(_HttpService):
    def __init__(self, base_url: str, model: str = "", **kwargs):
        super().__init__("image", base_url, model=model, **kwargs)

    def generate(
        self, prompt_chunks: Sequence[str], width_px: int, height_px: int, seed: int
    ) -> RasterImage:
        payload = {
            "model": self.model,
            "prompt_chunks": list(prompt_chunks),
            "width": width_px,
            "height": height_px,
            "seed": seed,
        }
        resp = self._post("/generate", payload)
        content_type = resp.headers.get("content-type", "")
        try:
            if content_type.startswith("image/png"):
                return RasterImage.from_png_bytes(resp.content)
            data = resp.json()
            return RasterImage.from_png_bytes(base64.b64decode(data["image_b64"]))
        except BackendFailure:
            raise
        except Exception as e:
            raise BackendFailure("image reply was not decodable PNG data", e) from e
