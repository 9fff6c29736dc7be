"""Rasterization: glyph filling, layer rotation, compositing, full renders.

Everything here is a pure function of its inputs; rendering the same
document twice yields bit-identical buffers.
"""
from __future__ import annotations

from pathlib import Path
from typing import Protocol

import numpy as np

from .document import Canvas, DesignDocument, ImageLayer, TextLayer
from .errors import MissingAsset
from .fonts import FontCatalog, GlyphBitmap, GlyphRect
from .image import Affine, RasterImage, add_rect_coverage, affine_sample, source_over
from .layout import LineLayout, layout_text

WHITE = (255, 255, 255, 255)


class AssetResolver(Protocol):
    def load(self, source_id: str) -> RasterImage: ...


class DirectoryAssets:
    """Resolves source ids to {dir}/{source_id}.png."""

    def __init__(self, directory):
        self._dir = Path(directory)

    def load(self, source_id: str) -> RasterImage:
        path = self._dir / f"{source_id}.png"
        if not path.is_file():
            raise MissingAsset(source_id)
        return RasterImage.load_png(path)


class DictAssets:
    def __init__(self, images: dict[str, RasterImage]):
        self._images = dict(images)

    def load(self, source_id: str) -> RasterImage:
        try:
            return self._images[source_id]
        except KeyError:
            raise MissingAsset(source_id) from None


def _text_coverage(
    lines: list[LineLayout], layer: TextLayer, canvas: Canvas, fonts: FontCatalog
) -> np.ndarray | None:
    face = fonts.resolve(layer.font_family)
    size = layer.font_size_px
    buf = np.zeros((canvas.height_px, canvas.width_px), dtype=np.float64)
    any_ink = False
    for line in lines:
        for glyph in line.glyphs:
            ink = face.render_glyph(glyph.char, size)
            if ink is None:
                continue
            any_ink = True
            if isinstance(ink, GlyphRect):
                add_rect_coverage(
                    buf,
                    glyph.x_px + ink.x0,
                    line.baseline_y_px + ink.y0,
                    glyph.x_px + ink.x1,
                    line.baseline_y_px + ink.y1,
                )
            elif isinstance(ink, GlyphBitmap):
                x0 = int(round(glyph.x_px)) + ink.dx
                y0 = int(round(line.baseline_y_px)) + ink.dy
                gh, gw = ink.coverage.shape
                bx0, by0 = max(0, x0), max(0, y0)
                bx1, by1 = min(canvas.width_px, x0 + gw), min(canvas.height_px, y0 + gh)
                if bx0 < bx1 and by0 < by1:
                    buf[by0:by1, bx0:bx1] += ink.coverage[by0 - y0 : by1 - y0, bx0 - x0 : bx1 - x0]
    if not any_ink:
        return None
    np.clip(buf, 0.0, 1.0, out=buf)
    return buf


def rasterize_layer(
    lines: list[LineLayout],
    layer: TextLayer,
    target: RasterImage,
    canvas: Canvas,
    fonts: FontCatalog,
) -> RasterImage:
    """Composite the laid-out text onto target (source-over, anti-aliased).

    Rotation by layer.angle_deg happens about the text box center. Pixels
    without glyph coverage are returned unchanged.
    """
    coverage = _text_coverage(lines, layer, canvas, fonts)
    if coverage is None:
        return target
    if layer.angle_deg % 360.0 != 0.0:
        cx = (layer.left + layer.width / 2.0) * canvas.width_px
        cy = layer.top * canvas.height_px + layer.derived_height_px() / 2.0
        transform = Affine.rotation_about(layer.angle_deg, cx, cy)
        coverage = affine_sample(coverage, transform, canvas.height_px, canvas.width_px)
        np.clip(coverage, 0.0, 1.0, out=coverage)
    color = np.array(layer.color_rgb, dtype=np.float64)
    src_rgb = np.broadcast_to(color, (canvas.height_px, canvas.width_px, 3))
    out = source_over(target.arr, src_rgb, coverage)
    return RasterImage(target.width_px, target.height_px, out)


def _composite_image_layer(
    target_arr: np.ndarray, layer: ImageLayer, asset: RasterImage, canvas: Canvas
) -> np.ndarray:
    dest_w, dest_h = canvas.width_px, canvas.height_px
    box_left = layer.left * dest_w
    box_top = layer.top * dest_h
    box_w = layer.width * dest_w
    box_h = layer.height * dest_h
    if box_w <= 0 or box_h <= 0:
        return target_arr
    # dest -> src: un-rotate about the box center, then un-place/un-scale.
    scale = Affine.scale_translate(
        asset.width_px / box_w, asset.height_px / box_h,
        -box_left * asset.width_px / box_w, -box_top * asset.height_px / box_h,
    )
    transform = scale
    if layer.angle_deg % 360.0 != 0.0:
        rot = Affine.rotation_about(layer.angle_deg, box_left + box_w / 2.0, box_top + box_h / 2.0)
        transform = scale.compose(rot)
    src = asset.arr.astype(np.float64)
    sampled = affine_sample(src, transform, dest_h, dest_w)
    alpha = np.clip(sampled[:, :, 3] / 255.0, 0.0, 1.0) * layer.opacity
    return source_over(target_arr, np.clip(sampled[:, :, :3], 0.0, 255.0), alpha)


def render_document(
    doc: DesignDocument, assets: AssetResolver, fonts: FontCatalog, wrap: bool = True
) -> RasterImage:
    """Rasterize the full document: white base, layers bottom to top."""
    canvas = doc.canvas
    result = RasterImage.filled(canvas.width_px, canvas.height_px, WHITE)
    for layer in doc.layers:
        if isinstance(layer, ImageLayer):
            asset = assets.load(layer.source_id)
            arr = _composite_image_layer(result.arr, layer, asset, canvas)
            result = RasterImage(canvas.width_px, canvas.height_px, arr)
        else:
            lines = layout_text(layer, canvas, fonts, wrap)
            result = rasterize_layer(lines, layer, result, canvas, fonts)
    return result


def resample_to_canvas(image: RasterImage, canvas: Canvas) -> RasterImage:
    """Center-crop to the canvas aspect ratio, then bilinear-scale to fit."""
    if image.width_px == canvas.width_px and image.height_px == canvas.height_px:
        return RasterImage(image.width_px, image.height_px, image.arr.copy())
    src_w, src_h = float(image.width_px), float(image.height_px)
    target_aspect = canvas.width_px / canvas.height_px
    src_aspect = src_w / src_h
    if src_aspect > target_aspect:
        crop_w = src_h * target_aspect
        crop_h = src_h
    else:
        crop_w = src_w
        crop_h = src_w / target_aspect
    crop_x0 = (src_w - crop_w) / 2.0
    crop_y0 = (src_h - crop_h) / 2.0
    transform = Affine.scale_translate(
        crop_w / canvas.width_px, crop_h / canvas.height_px, crop_x0, crop_y0
    )
    sampled = affine_sample(image.arr.astype(np.float64), transform, canvas.height_px, canvas.width_px)
    out = np.clip(np.rint(sampled), 0, 255).astype(np.uint8)
    return RasterImage(canvas.width_px, canvas.height_px, out)


def render_final(
    background: RasterImage,
    spec,
    canvas: Canvas,
    fonts: FontCatalog,
    wrap: bool = True,
) -> RasterImage:
    """Resample the generated background to the canvas, then draw spec texts in order."""
    result = resample_to_canvas(background, canvas)
    for layer in spec.texts:
        lines = layout_text(layer, canvas, fonts, wrap)
        result = rasterize_layer(lines, layer, result, canvas, fonts)
    return result


def text_coverage_mask(
    doc_or_texts, canvas: Canvas, fonts: FontCatalog, wrap: bool = True
) -> np.ndarray:
    """Boolean mask of pixels any text layer touches; used by difference oracles."""
    layers: list[TextLayer]
    if isinstance(doc_or_texts, DesignDocument):
        layers = [l for l in doc_or_texts.layers if isinstance(l, TextLayer)]
        canvas = doc_or_texts.canvas
    else:
        layers = list(doc_or_texts)
    mask = np.zeros((canvas.height_px, canvas.width_px), dtype=bool)
    for layer in layers:
        lines = layout_text(layer, canvas, fonts, wrap)
        cov = _text_coverage(lines, layer, canvas, fonts)
        if cov is None:
            continue
        if layer.angle_deg % 360.0 != 0.0:
            cx = (layer.left + layer.width / 2.0) * canvas.width_px
            cy = layer.top * canvas.height_px + layer.derived_height_px() / 2.0
            cov = affine_sample(cov, Affine.rotation_about(layer.angle_deg, cx, cy),
                                canvas.height_px, canvas.width_px)
        mask |= cov > 0.0
    return mask
