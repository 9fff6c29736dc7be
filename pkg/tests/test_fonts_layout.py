from __future__ import annotations

import logging
from pathlib import Path

import pytest

from designgen.document import Canvas, TextLayer
from designgen.fonts import FontCatalog, SyntheticFace, TrueTypeFace
from designgen.layout import layout_text, measure_line

CANVAS = Canvas(1000, 500)

DEJAVU = Path("/usr/share/fonts/truetype/dejavu/DejaVuSans.ttf")


def text_layer(**overrides) -> TextLayer:
    base = dict(
        text="AB", font_family="BlockMono", font_size_px=20.0, color_rgb=(0, 0, 0),
        left=0.1, top=0.1, width=0.5, letter_spacing_px=0.0, line_height=1.0,
        text_align="left", capitalize=False, angle_deg=0.0,
    )
    base.update(overrides)
    return TextLayer(**base)


def test_blockmono_metrics(fonts):
    face = fonts.face("BlockMono")
    assert face.advance("A") == 0.5
    assert face.metrics.ascent == 0.8
    assert face.metrics.descent == 0.2


def test_line_width_formula_hand_computed(fonts):
    # advance 10 px per glyph at size 20 (unit 0.5); "AB" with spacing 2 -> 22.
    face = fonts.face("BlockMono")
    assert measure_line("AB", face, 20.0, 2.0) == 22.0
    assert measure_line("A", face, 20.0, 2.0) == 10.0
    assert measure_line("", face, 20.0, 2.0) == 0.0


def test_empty_text_layout_is_empty(fonts):
    assert layout_text(text_layer(text=""), CANVAS, fonts) == []


def test_explicit_newlines_split_lines(fonts):
    lines = layout_text(text_layer(text="AB\nC"), CANVAS, fonts, wrap=False)
    assert [l.text for l in lines] == ["AB", "C"]


def test_baseline_positions(fonts):
    layer = text_layer(text="A\nB\nC", font_size_px=20.0, line_height=1.5, top=0.1)
    lines = layout_text(layer, CANVAS, fonts, wrap=False)
    top_px = 0.1 * CANVAS.height_px
    ascent = 0.8 * 20.0
    for i, line in enumerate(lines):
        assert line.baseline_y_px == pytest.approx(top_px + ascent + i * 1.5 * 20.0)


def test_left_alignment_starts_at_box_edge(fonts):
    layer = text_layer(text="AB", text_align="left")
    (line,) = layout_text(layer, CANVAS, fonts)
    assert line.glyphs[0].x_px == pytest.approx(0.1 * CANVAS.width_px)


def test_center_alignment_splits_gap_evenly(fonts):
    # "A B" wider than its box wraps into 2 centered lines.
    layer = text_layer(
        text="A B", font_size_px=20.0, width=15.0 / CANVAS.width_px, text_align="center"
    )
    lines = layout_text(layer, CANVAS, fonts, wrap=True)
    assert [l.text for l in lines] == ["A", "B"]
    box_left = layer.left * CANVAS.width_px
    box_width = 15.0
    for line in lines:
        left_gap = line.glyphs[0].x_px - box_left
        right_gap = box_left + box_width - (line.glyphs[0].x_px + line.line_width_px)
        assert left_gap == pytest.approx((box_width - line.line_width_px) / 2)
        assert abs(left_gap - right_gap) <= 1.0


def test_right_alignment(fonts):
    layer = text_layer(text="AB", text_align="right")
    (line,) = layout_text(layer, CANVAS, fonts)
    box_right = (layer.left + layer.width) * CANVAS.width_px
    assert line.glyphs[0].x_px + line.line_width_px == pytest.approx(box_right)


def test_wrap_keeps_single_oversized_word(fonts):
    layer = text_layer(text="ABCDEFGH IJ", font_size_px=20.0, width=30.0 / CANVAS.width_px)
    lines = layout_text(layer, CANVAS, fonts, wrap=True)
    assert [l.text for l in lines] == ["ABCDEFGH", "IJ"]
    assert lines[0].line_width_px > 30.0  # oversized word stays whole
    assert lines[1].line_width_px <= 30.0


def test_no_wrap_keeps_overflowing_line(fonts):
    layer = text_layer(text="ABCDEFGH IJ", font_size_px=20.0, width=30.0 / CANVAS.width_px)
    lines = layout_text(layer, CANVAS, fonts, wrap=False)
    assert [l.text for l in lines] == ["ABCDEFGH IJ"]


def test_capitalize_applied_at_layout(fonts):
    layer = text_layer(text="ab", capitalize=True)
    (line,) = layout_text(layer, CANVAS, fonts)
    assert line.text == "AB"


def test_missing_glyph_uses_notdef_and_logs(fonts, caplog):
    face = fonts.face("BlockMono")
    assert not face.has_glyph("é")
    layer = text_layer(text="é")
    with caplog.at_level(logging.INFO, logger="designgen.layout"):
        (line,) = layout_text(layer, CANVAS, fonts)
    assert line.glyphs[0].missing
    assert line.glyphs[0].advance_px == face.notdef_advance * 20.0
    assert any("notdef" in r.message for r in caplog.records)


def test_glyph_positions_accumulate_advance_and_spacing(fonts):
    layer = text_layer(text="ABC", letter_spacing_px=3.0)
    (line,) = layout_text(layer, CANVAS, fonts)
    xs = [g.x_px for g in line.glyphs]
    assert xs[1] - xs[0] == pytest.approx(10.0 + 3.0)
    assert xs[2] - xs[1] == pytest.approx(10.0 + 3.0)
    assert line.line_width_px == pytest.approx(30.0 + 2 * 3.0)


def test_synthetic_face_from_description_validates():
    with pytest.raises(ValueError):
        SyntheticFace.from_description(
            {"family": "Bad", "ascent": 0, "descent": 0.2, "advances": {"A": 0.5}}
        )


def test_catalog_resolve_falls_back_to_default(fonts):
    assert fonts.resolve("NoSuchFamily").family == fonts.default_family
    assert fonts.resolve("BlockVar").family == "BlockVar"


def test_blockvar_has_varied_advances(fonts):
    face = fonts.face("BlockVar")
    advances = {face.advance(c) for c in "ABCDEFGH"}
    assert len(advances) > 1


@pytest.mark.skipif(not DEJAVU.is_file(), reason="DejaVuSans.ttf not installed")
def test_truetype_face_layout_and_ink(fonts):
    face = TrueTypeFace("DejaVu", str(DEJAVU))
    assert face.advance("A") > 0
    assert face.metrics.ascent > 0
    ink = face.render_glyph("A", 24.0)
    assert ink is not None and ink.coverage.max() > 0
    catalog = fonts.with_faces({"DejaVu": face})
    layer = text_layer(text="Hello", font_family="DejaVu")
    (line,) = layout_text(layer, CANVAS, catalog)
    assert line.line_width_px > 0


def test_load_dir_merges_user_fonts(tmp_path, fonts):
    desc = {
        "family": "UserFace", "ascent": 0.7, "descent": 0.3,
        "advances": {"A": 1.0}, "notdef_advance": 1.0,
    }
    import json

    (tmp_path / "userface.json").write_text(json.dumps(desc))
    catalog = FontCatalog.load_dir(tmp_path)
    assert "UserFace" in catalog
    assert "BlockMono" in catalog
    assert catalog.face("UserFace").advance("A") == 1.0
