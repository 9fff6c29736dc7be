"""Text layout: line splitting, optional word wrap, glyph positioning.

Line width obeys the closed form
    sum(advance_px) + letter_spacing_px * (glyph_count - 1)
exactly; positions are continuous canvas-space pixels, pre-rotation.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass

from .document import Canvas, TextLayer
from .fonts import FontCatalog, FontFace

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class GlyphPos:
    char: str
    x_px: float
    advance_px: float
    missing: bool = False


@dataclass(frozen=True)
class LineLayout:
    text: str
    glyphs: tuple[GlyphPos, ...]
    line_width_px: float
    baseline_y_px: float


def measure_line(text: str, face: FontFace, size: float, letter_spacing_px: float) -> float:
    if not text:
        return 0.0
    total = 0.0
    for ch in text:
        total += face.advance(ch) * size
    return total + letter_spacing_px * (len(text) - 1)


def _wrap_line(text: str, face: FontFace, size: float, spacing: float, max_width: float) -> list[str]:
    """Greedy word wrap; a single word wider than the box stays on its own line."""
    if measure_line(text, face, size, spacing) <= max_width:
        return [text]
    words = text.split(" ")
    lines: list[str] = []
    current = ""
    for word in words:
        candidate = word if not current else current + " " + word
        if not current or measure_line(candidate, face, size, spacing) <= max_width:
            current = candidate
        else:
            lines.append(current)
            current = word
    lines.append(current)
    return lines


def layout_text(
    layer: TextLayer, canvas: Canvas, fonts: FontCatalog, wrap: bool = True
) -> list[LineLayout]:
    """Position every glyph of the layer in canvas space.

    Explicit newlines always break; with wrap=True overflowing lines are
    additionally word-wrapped to the box width. Glyphs absent from the face
    are replaced by its notdef glyph and logged, never fatal.
    """
    if layer.text == "":
        return []
    face = fonts.resolve(layer.font_family)
    size = layer.font_size_px
    spacing = layer.letter_spacing_px
    text = layer.text.upper() if layer.capitalize else layer.text

    box_left = layer.left * canvas.width_px
    box_top = layer.top * canvas.height_px
    box_width = layer.width * canvas.width_px

    lines: list[str] = []
    for raw in text.split("\n"):
        if wrap:
            lines.extend(_wrap_line(raw, face, size, spacing, box_width))
        else:
            lines.append(raw)

    ascent_px = face.metrics.ascent * size
    line_step = layer.line_height * size
    result: list[LineLayout] = []
    for i, line in enumerate(lines):
        width = measure_line(line, face, size, spacing)
        if layer.text_align == "center":
            x = box_left + (box_width - width) / 2.0
        elif layer.text_align == "right":
            x = box_left + box_width - width
        else:
            x = box_left
        baseline = box_top + ascent_px + i * line_step
        glyphs: list[GlyphPos] = []
        for ch in line:
            missing = not face.has_glyph(ch)
            if missing:
                log.info("glyph %r missing from face %s; using notdef", ch, face.family)
            adv = face.advance(ch) * size
            glyphs.append(GlyphPos(char=ch, x_px=x, advance_px=adv, missing=missing))
            x += adv + spacing
        result.append(
            LineLayout(text=line, glyphs=tuple(glyphs), line_width_px=width, baseline_y_px=baseline)
        )
    return result
