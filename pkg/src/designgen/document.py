"""Layered design documents: canvas, image/text layers, JSON (de)serialization.

Serialized form is a UTF-8 JSON file with sorted keys and normalized
numbers, so parse -> serialize is a canonicalizing identity.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from typing import Union

from .errors import MalformedSyntax, SchemaViolation
from .jsonx import canonical_json_bytes

TEXT_ALIGNS = ("left", "center", "right")

# Layer boxes may bleed past the canvas edge, as real templates do.
MIN_OFFSET = -0.25
MAX_OFFSET = 1.0
MAX_EXTENT = 2.0


@dataclass(frozen=True)
class Canvas:
    width_px: int
    height_px: int

    def __post_init__(self):
        if self.width_px < 1 or self.height_px < 1:
            raise ValueError("canvas dimensions must be >= 1")

    @property
    def area_px(self) -> int:
        return self.width_px * self.height_px


@dataclass(frozen=True)
class ImageLayer:
    source_id: str
    left: float
    top: float
    width: float
    height: float
    opacity: float = 1.0
    angle_deg: float = 0.0


@dataclass(frozen=True)
class TextLayer:
    text: str
    font_family: str
    font_size_px: float
    color_rgb: tuple[int, int, int]
    left: float
    top: float
    width: float
    letter_spacing_px: float = 0.0
    line_height: float = 1.2
    text_align: str = "left"
    capitalize: bool = False
    angle_deg: float = 0.0

    def line_count(self) -> int:
        return self.text.count("\n") + 1

    def derived_height_px(self) -> float:
        """Box height is not stored; it follows from the line stack."""
        return self.line_count() * self.line_height * self.font_size_px


Layer = Union[ImageLayer, TextLayer]


@dataclass(frozen=True)
class DesignDocument:
    id: str
    canvas: Canvas
    layers: tuple[Layer, ...]
    title: str = ""
    format: str = ""
    keywords: tuple[str, ...] = field(default_factory=tuple)


def strip_text_layers(doc: DesignDocument) -> DesignDocument:
    """Drop every text layer; image layers keep their relative order."""
    return replace(doc, layers=tuple(l for l in doc.layers if isinstance(l, ImageLayer)))


def parse_color_hex(value, path: str) -> tuple[int, int, int]:
    if not isinstance(value, str) or len(value) != 7 or not value.startswith("#"):
        raise SchemaViolation(path, "expected '#RRGGBB'")
    try:
        r = int(value[1:3], 16)
        g = int(value[3:5], 16)
        b = int(value[5:7], 16)
    except ValueError:
        raise SchemaViolation(path, "expected '#RRGGBB'") from None
    return (r, g, b)


def color_to_hex(rgb: tuple[int, int, int]) -> str:
    return "#{:02x}{:02x}{:02x}".format(*rgb)


def _require(obj: dict, key: str, path: str):
    if key not in obj:
        raise SchemaViolation(f"{path}.{key}", "missing")
    return obj[key]


def _as_number(value, path: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise SchemaViolation(path, "expected a number")
    return float(value)


def _as_int(value, path: str) -> int:
    if isinstance(value, bool):
        raise SchemaViolation(path, "expected an integer")
    if isinstance(value, int):
        return value
    if isinstance(value, float) and value == int(value):
        return int(value)
    raise SchemaViolation(path, "expected an integer")


def _as_str(value, path: str) -> str:
    if not isinstance(value, str):
        raise SchemaViolation(path, "expected a string")
    return value


def _check_range(v: float, lo: float, hi: float, path: str, *, lo_open=False, hi_open=False) -> float:
    bad = v < lo or v > hi or (lo_open and v == lo) or (hi_open and v == hi)
    if bad:
        raise SchemaViolation(path, f"value {v} out of range")
    return v


def _bounded(obj: dict, key: str, lo: float, hi: float, path: str, *, lo_open=False) -> float:
    return _check_range(
        _as_number(_require(obj, key, path), f"{path}.{key}"), lo, hi, f"{path}.{key}", lo_open=lo_open
    )


def _parse_image_layer(obj: dict, path: str) -> ImageLayer:
    return ImageLayer(
        source_id=_as_str(_require(obj, "source_id", path), f"{path}.source_id"),
        left=_bounded(obj, "left", MIN_OFFSET, MAX_OFFSET, path),
        top=_bounded(obj, "top", MIN_OFFSET, MAX_OFFSET, path),
        width=_bounded(obj, "width", 0.0, MAX_EXTENT, path, lo_open=True),
        height=_bounded(obj, "height", 0.0, MAX_EXTENT, path, lo_open=True),
        opacity=_check_range(
            _as_number(obj.get("opacity", 1.0), f"{path}.opacity"), 0.0, 1.0, f"{path}.opacity"
        ),
        angle_deg=_as_number(obj.get("angle_deg", 0.0), f"{path}.angle_deg"),
    )


def _parse_text_layer(obj: dict, canvas: Canvas, path: str) -> TextLayer:
    font_size = _as_number(_require(obj, "font_size_px", path), f"{path}.font_size_px")
    if font_size <= 0:
        raise SchemaViolation(f"{path}.font_size_px", "must be positive")
    line_height = _as_number(obj.get("line_height", 1.2), f"{path}.line_height")
    if line_height <= 0:
        raise SchemaViolation(f"{path}.line_height", "must be positive")
    align = _as_str(obj.get("text_align", "left"), f"{path}.text_align")
    if align not in TEXT_ALIGNS:
        raise SchemaViolation(f"{path}.text_align", f"expected one of {TEXT_ALIGNS}")
    capitalize = obj.get("capitalize", False)
    if not isinstance(capitalize, bool):
        raise SchemaViolation(f"{path}.capitalize", "expected a boolean")
    spacing = _as_number(obj.get("letter_spacing_px", 0.0), f"{path}.letter_spacing_px")
    if spacing < 0:
        raise SchemaViolation(f"{path}.letter_spacing_px", "must be >= 0")
    layer = TextLayer(
        text=_as_str(_require(obj, "text", path), f"{path}.text"),
        font_family=_as_str(_require(obj, "font_family", path), f"{path}.font_family"),
        font_size_px=font_size,
        color_rgb=parse_color_hex(_require(obj, "color", path), f"{path}.color"),
        left=_bounded(obj, "left", MIN_OFFSET, MAX_OFFSET, path),
        top=_bounded(obj, "top", MIN_OFFSET, MAX_OFFSET, path),
        width=_bounded(obj, "width", 0.0, MAX_EXTENT, path, lo_open=True),
        letter_spacing_px=spacing,
        line_height=line_height,
        text_align=align,
        capitalize=capitalize,
        angle_deg=_as_number(obj.get("angle_deg", 0.0), f"{path}.angle_deg"),
    )
    # The text box must overlap the canvas with positive area.
    if layer.left >= 1.0 or layer.left + layer.width <= 0.0:
        raise SchemaViolation(f"{path}.left", "box lies outside the canvas")
    h_frac = layer.derived_height_px() / canvas.height_px
    if layer.top >= 1.0 or layer.top + h_frac <= 0.0:
        raise SchemaViolation(f"{path}.top", "box lies outside the canvas")
    return layer


def parse_document(data: bytes | str) -> DesignDocument:
    """Parse a serialized document, validating every invariant.

    Raises MalformedSyntax for unparsable input and SchemaViolation (with a
    field path) for structural problems.
    """
    if isinstance(data, bytes):
        try:
            data = data.decode("utf-8")
        except UnicodeDecodeError as e:
            raise MalformedSyntax(f"not valid UTF-8: {e}") from e
    try:
        obj = json.loads(data)
    except json.JSONDecodeError as e:
        raise MalformedSyntax(f"not valid JSON: {e}") from e
    if not isinstance(obj, dict):
        raise SchemaViolation("$", "expected a JSON object")

    canvas_obj = _require(obj, "canvas", "$")
    if not isinstance(canvas_obj, dict):
        raise SchemaViolation("canvas", "expected an object")
    w = _as_int(_require(canvas_obj, "width_px", "canvas"), "canvas.width_px")
    h = _as_int(_require(canvas_obj, "height_px", "canvas"), "canvas.height_px")
    if w < 1 or h < 1:
        raise SchemaViolation("canvas", "dimensions must be >= 1")
    canvas = Canvas(w, h)

    meta = obj.get("metadata", {})
    if not isinstance(meta, dict):
        raise SchemaViolation("metadata", "expected an object")
    keywords = meta.get("keywords", [])
    if not isinstance(keywords, list) or any(not isinstance(k, str) for k in keywords):
        raise SchemaViolation("metadata.keywords", "expected a list of strings")

    layers_obj = obj.get("layers", [])
    if not isinstance(layers_obj, list):
        raise SchemaViolation("layers", "expected a list")
    layers: list[Layer] = []
    for i, item in enumerate(layers_obj):
        path = f"layers[{i}]"
        if not isinstance(item, dict):
            raise SchemaViolation(path, "expected an object")
        kind = item.get("kind")
        if kind == "image":
            layers.append(_parse_image_layer(item, path))
        elif kind == "text":
            layers.append(_parse_text_layer(item, canvas, path))
        else:
            raise SchemaViolation(f"{path}.kind", "expected 'image' or 'text'")

    return DesignDocument(
        id=_as_str(_require(obj, "id", "$"), "id"),
        canvas=canvas,
        layers=tuple(layers),
        title=_as_str(meta.get("title", ""), "metadata.title"),
        format=_as_str(meta.get("format", ""), "metadata.format"),
        keywords=tuple(keywords),
    )


def _layer_to_dict(layer: Layer) -> dict:
    if isinstance(layer, ImageLayer):
        return {
            "kind": "image",
            "source_id": layer.source_id,
            "left": layer.left,
            "top": layer.top,
            "width": layer.width,
            "height": layer.height,
            "opacity": layer.opacity,
            "angle_deg": layer.angle_deg,
        }
    return {
        "kind": "text",
        "text": layer.text,
        "font_family": layer.font_family,
        "font_size_px": layer.font_size_px,
        "color": color_to_hex(layer.color_rgb),
        "left": layer.left,
        "top": layer.top,
        "width": layer.width,
        "letter_spacing_px": layer.letter_spacing_px,
        "line_height": layer.line_height,
        "text_align": layer.text_align,
        "capitalize": layer.capitalize,
        "angle_deg": layer.angle_deg,
    }


def document_to_dict(doc: DesignDocument) -> dict:
    return {
        "id": doc.id,
        "canvas": {"width_px": doc.canvas.width_px, "height_px": doc.canvas.height_px},
        "metadata": {
            "title": doc.title,
            "format": doc.format,
            "keywords": list(doc.keywords),
        },
        "layers": [_layer_to_dict(l) for l in doc.layers],
    }


def serialize_document(doc: DesignDocument) -> bytes:
    """Canonical UTF-8 bytes; all optional fields emitted at their effective values."""
    return canonical_json_bytes(document_to_dict(doc))
