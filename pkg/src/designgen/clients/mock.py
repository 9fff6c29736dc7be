"""Deterministic offline backends.

Every mock derives its output from a hash of the request plus the sampling
seed, so identical requests always produce identical replies and no test
ever touches the network.
"""
from __future__ import annotations

import hashlib
import json
from typing import Sequence

from ..image import RasterImage
from ..jsonx import compact_json, extract_json_object
from ..rng import SplitMix64
from .base import CallRecorder, SamplingParams

_ADJECTIVES = ("warm", "bold", "minimal", "vibrant", "serene", "rustic", "sleek", "playful")
_COLORS = ("teal", "coral", "navy", "amber", "sage", "charcoal", "cream", "plum")
_OBJECTS = ("lantern", "bicycle", "mountain", "coffee cup", "leaf", "guitar", "kite", "rocket")
_MOODS = ("festive", "calm", "energetic", "elegant", "cozy", "modern", "dreamy", "crisp")
_VERBS = ("celebrate", "discover", "join", "enjoy", "explore", "save", "create", "taste")


def _rng_for(*parts: object) -> SplitMix64:
    h = hashlib.sha256()
    for part in parts:
        h.update(repr(part).encode("utf-8"))
        h.update(b"\x1f")
    return SplitMix64(int.from_bytes(h.digest()[:8], "big"))


def _pick(rng: SplitMix64, options: Sequence[str]) -> str:
    return options[rng.below(len(options))]


class MockTextGen:
    """Replies with a design plan when the prompt asks for one, else a one-line intention."""

    def __init__(self, recorder: CallRecorder | None = None):
        self._recorder = recorder

    def complete(self, prompt: str, sampling: SamplingParams) -> str:
        if self._recorder:
            self._recorder.record("text", network=False)
        rng = _rng_for("text", prompt, sampling.seed, sampling.temperature)
        if '"captions"' in prompt:
            return self._plan_reply(rng)
        return self._intention_reply(rng)

    @staticmethod
    def _plan_reply(rng: SplitMix64) -> str:
        color = _pick(rng, _COLORS)
        obj = _pick(rng, _OBJECTS)
        mood = _pick(rng, _MOODS)
        adj = _pick(rng, _ADJECTIVES)
        verb = _pick(rng, _VERBS)
        plan = {
            "description": f"A {adj} {mood} design featuring a {obj} over a {color} backdrop.",
            "keywords": [color, obj, mood],
            "captions": {
                "background": f"A {color} backdrop with a {mood} atmosphere.",
                "objects": f"A {obj} placed near the lower half of the frame.",
            },
            "headings": {
                "heading": [f"{verb.upper()} {obj.upper()}"],
                "subheading": [f"A {mood} moment"],
            },
        }
        body = compact_json(plan)
        # Sometimes fence the reply, as real models do.
        if rng.below(3) == 0:
            return f"Here is the plan:\n```json\n{body}\n```"
        return body

    @staticmethod
    def _intention_reply(rng: SplitMix64) -> str:
        adj = _pick(rng, _ADJECTIVES)
        obj = _pick(rng, _OBJECTS)
        mood = _pick(rng, _MOODS)
        return f"Design a {adj} {mood} announcement built around a {obj}."


class MockImageGen:
    """Procedural design image: hashed solid background plus a blank text region.

    The reserved light rectangle in the upper third mimics generated designs
    leaving empty space for typography.
    """

    def __init__(self, recorder: CallRecorder | None = None):
        self._recorder = recorder

    def generate(
        self, prompt_chunks: Sequence[str], width_px: int, height_px: int, seed: int
    ) -> RasterImage:
        if self._recorder:
            self._recorder.record("image", network=False)
        rng = _rng_for("image", tuple(prompt_chunks), width_px, height_px, seed)
        r = 30 + rng.below(150)
        g = 30 + rng.below(150)
        b = 30 + rng.below(150)
        img = RasterImage.filled(width_px, height_px, (r, g, b, 255))
        arr = img.arr.copy()
        x0, x1 = int(width_px * 0.08), int(width_px * 0.92)
        y0, y1 = int(height_px * 0.04), int(height_px * 0.30)
        arr[y0:y1, x0:x1] = (245, 245, 240, 255)
        return RasterImage(width_px, height_px, arr)


class MockMultimodal:
    """Serves typography, plan-item extraction, and judge prompts by inspecting
    which output schema the prompt describes."""

    def __init__(self, recorder: CallRecorder | None = None):
        self._recorder = recorder

    def complete(self, image: RasterImage, prompt: str, sampling: SamplingParams) -> str:
        if self._recorder:
            self._recorder.record("multimodal", network=False)
        rng = _rng_for("multimodal", image.content_hash(), prompt, sampling.seed)
        if '"font_family"' in prompt:
            return self._typography_reply(prompt)
        if '"innovation"' in prompt:
            return self._judge_reply(rng)
        for kind in ("description", "keywords", "captions", "headings"):
            if f'"{kind}"' in prompt:
                return self._extraction_reply(kind, rng)
        return "I cannot help with that."

    @staticmethod
    def _typography_reply(prompt: str) -> str:
        request = extract_json_object(prompt)
        texts = request.get("texts", [])
        canvas = request.get("canvas", {})
        height = int(canvas.get("height_px", 1024))
        elements = []
        top = 0.06
        for i, text in enumerate(texts):
            size_frac = 0.08 if i % 2 == 0 else 0.05
            elements.append(
                {
                    "text": str(text),
                    "font_family": "BlockMono",
                    "font_size_px": round(size_frac * height, 2),
                    "color": "#1c1c1c",
                    "letter_spacing_px": 0,
                    "line_height": 1.2,
                    "text_align": "center",
                    "capitalize": False,
                    "left": 0.1,
                    "top": round(top, 4),
                    "width": 0.8,
                    "angle_deg": 0,
                }
            )
            top += size_frac * 1.3
        return json.dumps({"texts": elements})

    @staticmethod
    def _judge_reply(rng: SplitMix64) -> str:
        keys = (
            "design_layout",
            "content_relevance",
            "typography_color",
            "graphics_images",
            "innovation",
        )
        scores = {k: round(1.0 + rng.below(9001) / 1000.0, 3) for k in keys}
        return json.dumps(scores)

    @staticmethod
    def _extraction_reply(kind: str, rng: SplitMix64) -> str:
        color = _pick(rng, _COLORS)
        obj = _pick(rng, _OBJECTS)
        mood = _pick(rng, _MOODS)
        adj = _pick(rng, _ADJECTIVES)
        if kind == "description":
            fragment = {
                "description": f"A {adj} composition with a {obj} set against a {color} field."
            }
        elif kind == "keywords":
            fragment = {"keywords": [color, obj, mood]}
        elif kind == "captions":
            fragment = {
                "captions": {
                    "background": f"A {color} background with {mood} lighting.",
                    "objects": f"A {obj} anchoring the lower area.",
                }
            }
        else:
            fragment = {
                "headings": {
                    "heading": [obj.upper()],
                    "subheading": [f"{adj} and {mood}"],
                }
            }
        return json.dumps(fragment)
