"""Typography generation: request building, parsing, validation, and repair.

The multimodal service sees the generated image plus a prompt carrying the
texts to place, the canvas size, and the output schema. Its JSON reply is
parsed with the same tolerance as design plans, then repaired so every text
box lands at least partially on the canvas with a known font.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, replace

from .clients.base import MultimodalClient, SamplingParams
from .document import TEXT_ALIGNS, Canvas, TextLayer, color_to_hex, parse_color_hex
from .errors import GenerationExhausted, InvalidTypography, ModelOutputError, SchemaViolation
from .fonts import FontCatalog
from .image import RasterImage
from .jsonx import canonical_json, compact_json, extract_json_object
from .plan import DesignPlan

log = logging.getLogger(__name__)

MIN_FONT_SIZE_PX = 4.0
# At least this fraction of a text box must stay on-canvas after repair.
MIN_INSIDE_FRACTION = 0.1


@dataclass(frozen=True)
class TypographySpec:
    texts: tuple[TextLayer, ...]


def flatten_headings(plan: DesignPlan) -> list[str]:
    """Headings then subheadings, order and duplicates preserved."""
    return list(plan.headings.heading) + list(plan.headings.subheading)


_SCHEMA_NOTE = """Reply with a JSON object of this exact shape (one entry per text, in reading \
order):
{"texts": [{"text": "...", "font_family": "...", "font_size_px": 48, "color": "#1a2b3c", \
"letter_spacing_px": 0, "line_height": 1.2, "text_align": "left|center|right", \
"capitalize": false, "left": 0.1, "top": 0.1, "width": 0.8, "angle_deg": 0}]}
left, top, and width are fractions of the canvas. Use "\\n" inside "text" for line breaks. \
Respond with JSON only."""


def build_typography_request(plan: DesignPlan, canvas: Canvas) -> str:
    """Deterministic prompt: placement task, input block, output schema."""
    payload = {
        "texts": flatten_headings(plan),
        "canvas": {"width_px": canvas.width_px, "height_px": canvas.height_px},
    }
    return (
        "Choose typography for the design shown in the image. Place every text from the "
        "input onto the canvas, picking font, size, color, spacing, and position that keep "
        "the texts legible over the artwork.\n\n"
        f"INPUT: {compact_json(payload)}\n\n" + _SCHEMA_NOTE
    )


def typography_to_dict(spec: TypographySpec) -> dict:
    return {
        "texts": [
            {
                "text": t.text,
                "font_family": t.font_family,
                "font_size_px": t.font_size_px,
                "color": color_to_hex(t.color_rgb),
                "letter_spacing_px": t.letter_spacing_px,
                "line_height": t.line_height,
                "text_align": t.text_align,
                "capitalize": t.capitalize,
                "left": t.left,
                "top": t.top,
                "width": t.width,
                "angle_deg": t.angle_deg,
            }
            for t in spec.texts
        ]
    }


def serialize_typography(spec: TypographySpec) -> str:
    return canonical_json(typography_to_dict(spec))


def _number(obj: dict, key: str, default, path: str) -> float:
    value = obj.get(key, default)
    if value is None or isinstance(value, bool) or not isinstance(value, (int, float)):
        raise InvalidTypography(f"{path}.{key}", "expected a number")
    return float(value)


def _element_from_dict(obj: dict, fonts: FontCatalog, path: str) -> TextLayer:
    if not isinstance(obj, dict):
        raise InvalidTypography(path, "expected an object")
    text = obj.get("text")
    if not isinstance(text, str):
        raise InvalidTypography(f"{path}.text", "expected a string")
    family = obj.get("font_family", fonts.default_family)
    if not isinstance(family, str):
        raise InvalidTypography(f"{path}.font_family", "expected a string")
    font_size = _number(obj, "font_size_px", None, path)
    if font_size <= 0:
        raise InvalidTypography(f"{path}.font_size_px", "must be positive")
    try:
        color = parse_color_hex(obj.get("color", "#000000"), f"{path}.color")
    except SchemaViolation as e:
        raise InvalidTypography(e.path, e.reason) from None
    spacing = _number(obj, "letter_spacing_px", 0.0, path)
    if spacing < 0:
        raise InvalidTypography(f"{path}.letter_spacing_px", "must be >= 0")
    line_height = _number(obj, "line_height", 1.2, path)
    if line_height <= 0:
        raise InvalidTypography(f"{path}.line_height", "must be positive")
    align = obj.get("text_align", "left")
    if align not in TEXT_ALIGNS:
        raise InvalidTypography(f"{path}.text_align", f"expected one of {TEXT_ALIGNS}")
    capitalize = obj.get("capitalize", False)
    if not isinstance(capitalize, bool):
        raise InvalidTypography(f"{path}.capitalize", "expected a boolean")
    width = _number(obj, "width", None, path)
    if width <= 0:
        raise InvalidTypography(f"{path}.width", "must be positive")
    return TextLayer(
        text=text,
        font_family=family,
        font_size_px=font_size,
        color_rgb=color,
        left=_number(obj, "left", None, path),
        top=_number(obj, "top", None, path),
        width=width,
        letter_spacing_px=spacing,
        line_height=line_height,
        text_align=align,
        capitalize=capitalize,
        angle_deg=_number(obj, "angle_deg", 0.0, path),
    )


def _clamp(v: float, lo: float, hi: float) -> float:
    return lo if v < lo else hi if v > hi else v


def repair_spec(
    spec: TypographySpec,
    canvas: Canvas,
    fonts: FontCatalog,
    warnings: list[str] | None = None,
) -> TypographySpec:
    """Coerce a spec into renderable form; idempotent.

    Unknown font families fall back to the catalog default (recorded as a
    warning); font sizes clamp to [4, canvas height]; left/top clamp so at
    least 10% of the box width/height stays on-canvas.
    """
    repaired = []
    for i, t in enumerate(spec.texts):
        if t.font_family not in fonts:
            message = f"texts[{i}]: unknown font family {t.font_family!r}, using {fonts.default_family!r}"
            log.warning(message)
            if warnings is not None:
                warnings.append(message)
            t = replace(t, font_family=fonts.default_family)
        size = _clamp(t.font_size_px, MIN_FONT_SIZE_PX, float(canvas.height_px))
        if size != t.font_size_px:
            t = replace(t, font_size_px=size)
        h_frac = t.derived_height_px() / canvas.height_px
        left = _clamp(t.left, MIN_INSIDE_FRACTION * t.width - t.width, 1.0 - MIN_INSIDE_FRACTION * t.width)
        top = _clamp(t.top, MIN_INSIDE_FRACTION * h_frac - h_frac, 1.0 - MIN_INSIDE_FRACTION * h_frac)
        if left != t.left or top != t.top:
            t = replace(t, left=left, top=top)
        repaired.append(t)
    return TypographySpec(texts=tuple(repaired))


def parse_typography(
    raw: str,
    canvas: Canvas,
    fonts: FontCatalog,
    warnings: list[str] | None = None,
) -> TypographySpec:
    """Extract, validate, and repair a typography reply.

    Raises NoJsonFound or InvalidTypography (with texts[i].field paths);
    both signal the caller to retry.
    """
    obj = extract_json_object(raw)
    texts_obj = obj.get("texts")
    if isinstance(texts_obj, dict):
        texts_obj = [texts_obj]
    if not isinstance(texts_obj, list):
        raise InvalidTypography("texts", "expected a list")
    elements = [
        _element_from_dict(item, fonts, f"texts[{i}]") for i, item in enumerate(texts_obj)
    ]
    return repair_spec(TypographySpec(texts=tuple(elements)), canvas, fonts, warnings)


def generate_typography(
    client: MultimodalClient,
    plan: DesignPlan,
    image: RasterImage,
    canvas: Canvas,
    fonts: FontCatalog,
    seed: int = 0,
    max_retries: int = 3,
    sampling: SamplingParams | None = None,
) -> TypographySpec:
    """First reply that parses into a valid (post-repair) spec within retries."""
    if max_retries < 1:
        raise ValueError("max_retries must be >= 1")
    base = sampling or SamplingParams()
    prompt = build_typography_request(plan, canvas)
    last_error: Exception | None = None
    for attempt in range(max_retries):
        raw = client.complete(image, prompt, base.with_seed(seed + attempt))
        try:
            return parse_typography(raw, canvas, fonts)
        except ModelOutputError as e:
            last_error = e
    raise GenerationExhausted(max_retries, last_error)
