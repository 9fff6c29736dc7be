"""RGBA raster buffers and the sampling/compositing primitives behind the renderer.

All geometry uses continuous pixel coordinates where pixel (row i, col j)
covers the unit square [j, j+1] x [i, i+1] and has its center at
(j + 0.5, i + 0.5). Bilinear sampling outside the source reads as fully
transparent. With an identity transform the sampler reproduces the source
bit-exactly, which several renderer identities rely on.
"""
from __future__ import annotations

import hashlib
import io
import math
from dataclasses import dataclass

import numpy as np
from PIL import Image


class RasterImage:
    """Immutable 8-bit RGBA image. Pixel buffer is row-major, 4 bytes/pixel."""

    __slots__ = ("width_px", "height_px", "_arr")

    def __init__(self, width_px: int, height_px: int, pixels: bytes | np.ndarray):
        if width_px < 1 or height_px < 1:
            raise ValueError("image dimensions must be positive")
        if isinstance(pixels, np.ndarray):
            arr = np.ascontiguousarray(pixels, dtype=np.uint8)
            if arr.shape != (height_px, width_px, 4):
                raise ValueError(f"pixel array shape {arr.shape} != ({height_px}, {width_px}, 4)")
        else:
            if len(pixels) != width_px * height_px * 4:
                raise ValueError(
                    f"pixel buffer length {len(pixels)} != {width_px}x{height_px}x4"
                )
            arr = np.frombuffer(bytes(pixels), dtype=np.uint8).reshape(height_px, width_px, 4)
        arr.setflags(write=False)
        object.__setattr__(self, "width_px", width_px)
        object.__setattr__(self, "height_px", height_px)
        object.__setattr__(self, "_arr", arr)

    def __setattr__(self, name, value):
        raise AttributeError("RasterImage is immutable")

    @property
    def arr(self) -> np.ndarray:
        """Read-only (h, w, 4) uint8 view."""
        return self._arr

    @property
    def pixels(self) -> bytes:
        return self._arr.tobytes()

    @classmethod
    def filled(cls, width_px: int, height_px: int, rgba: tuple[int, int, int, int]) -> "RasterImage":
        arr = np.empty((height_px, width_px, 4), dtype=np.uint8)
        arr[:, :] = rgba
        return cls(width_px, height_px, arr)

    @classmethod
    def from_png_bytes(cls, data: bytes) -> "RasterImage":
        with Image.open(io.BytesIO(data)) as im:
            im = im.convert("RGBA")
            arr = np.asarray(im, dtype=np.uint8)
        return cls(im.width, im.height, arr)

    @classmethod
    def load_png(cls, path) -> "RasterImage":
        with open(path, "rb") as fh:
            return cls.from_png_bytes(fh.read())

    def to_png_bytes(self) -> bytes:
        im = Image.fromarray(self._arr, mode="RGBA")
        buf = io.BytesIO()
        im.save(buf, format="PNG")
        return buf.getvalue()

    def save_png(self, path) -> None:
        with open(path, "wb") as fh:
            fh.write(self.to_png_bytes())

    def content_hash(self) -> str:
        h = hashlib.sha256()
        h.update(f"{self.width_px}x{self.height_px}:".encode())
        h.update(self._arr.tobytes())
        return h.hexdigest()

    def __eq__(self, other) -> bool:
        if not isinstance(other, RasterImage):
            return NotImplemented
        return (
            self.width_px == other.width_px
            and self.height_px == other.height_px
            and np.array_equal(self._arr, other._arr)
        )

    def __hash__(self):
        return hash(self.content_hash())

    def __repr__(self):
        return f"RasterImage({self.width_px}x{self.height_px})"


@dataclass(frozen=True)
class Affine:
    """2x3 map from destination continuous coords to source continuous coords."""

    m00: float
    m01: float
    m02: float
    m10: float
    m11: float
    m12: float

    @classmethod
    def identity(cls) -> "Affine":
        return cls(1.0, 0.0, 0.0, 0.0, 1.0, 0.0)

    def compose(self, other: "Affine") -> "Affine":
        """self after other: dest -> other -> self."""
        return Affine(
            self.m00 * other.m00 + self.m01 * other.m10,
            self.m00 * other.m01 + self.m01 * other.m11,
            self.m00 * other.m02 + self.m01 * other.m12 + self.m02,
            self.m10 * other.m00 + self.m11 * other.m10,
            self.m10 * other.m01 + self.m11 * other.m11,
            self.m11 * other.m12 + self.m10 * other.m02 + self.m12,
        )

    @classmethod
    def rotation_about(cls, angle_deg: float, cx: float, cy: float) -> "Affine":
        """Inverse map for a counterclockwise (screen-space) rotation about (cx, cy)."""
        # y axis points down; sampling un-rotates dest points about the center.
        t = math.radians(angle_deg)
        c, s = math.cos(t), math.sin(t)
        return cls(c, -s, cx - c * cx + s * cy, s, c, cy - s * cx - c * cy)

    @classmethod
    def scale_translate(cls, sx: float, sy: float, tx: float, ty: float) -> "Affine":
        """src = (dest) * s + t."""
        return cls(sx, 0.0, tx, 0.0, sy, ty)


def affine_sample(src: np.ndarray, transform: Affine, out_h: int, out_w: int) -> np.ndarray:
    """Bilinear-sample src (h, w[, c]) float array through a dest->src affine map.

    Regions mapping outside the source read as zero.
    """
    single = src.ndim == 2
    if single:
        src = src[:, :, None]
    h, w, c = src.shape
    padded = np.zeros((h + 2, w + 2, c), dtype=np.float64)
    padded[1:-1, 1:-1] = src

    ys, xs = np.mgrid[0:out_h, 0:out_w]
    cx = xs + 0.5
    cy = ys + 0.5
    sx = transform.m00 * cx + transform.m01 * cy + transform.m02
    sy = transform.m10 * cx + transform.m11 * cy + transform.m12

    fx = sx - 0.5
    fy = sy - 0.5
    x0 = np.floor(fx)
    y0 = np.floor(fy)
    tx = fx - x0
    ty = fy - y0
    # Shift into padded index space; anything far outside clamps onto the
    # zero border, so out-of-range samples contribute nothing.
    xi = np.clip(x0.astype(np.int64) + 1, 0, w)
    yi = np.clip(y0.astype(np.int64) + 1, 0, h)
    outside = (fx < -1) | (fx > w) | (fy < -1) | (fy > h)
    xi[outside] = 0
    yi[outside] = 0

    p00 = padded[yi, xi]
    p01 = padded[yi, xi + 1]
    p10 = padded[yi + 1, xi]
    p11 = padded[yi + 1, xi + 1]
    txc = tx[..., None]
    tyc = ty[..., None]
    out = (
        p00 * (1 - txc) * (1 - tyc)
        + p01 * txc * (1 - tyc)
        + p10 * (1 - txc) * tyc
        + p11 * txc * tyc
    )
    return out[:, :, 0] if single else out


def source_over(dst: np.ndarray, src_rgb: np.ndarray, src_alpha: np.ndarray) -> np.ndarray:
    """Straight-alpha source-over of (src_rgb in 0..255, src_alpha in 0..1) onto uint8 RGBA."""
    da = dst[:, :, 3].astype(np.float64) / 255.0
    dc = dst[:, :, :3].astype(np.float64)
    sa = src_alpha
    oa = sa + da * (1.0 - sa)
    keep = (da * (1.0 - sa))[..., None]
    num = src_rgb * sa[..., None] + dc * keep
    with np.errstate(invalid="ignore", divide="ignore"):
        oc = np.where(oa[..., None] > 0, num / np.maximum(oa[..., None], 1e-300), 0.0)
    out = np.empty_like(dst)
    out[:, :, :3] = np.clip(np.rint(oc), 0, 255).astype(np.uint8)
    out[:, :, 3] = np.clip(np.rint(oa * 255.0), 0, 255).astype(np.uint8)
    return out


def add_rect_coverage(buf: np.ndarray, x0: float, y0: float, x1: float, y1: float) -> None:
    """Accumulate exact area coverage of an axis-aligned rect into a float buffer."""
    if x1 <= x0 or y1 <= y0:
        return
    h, w = buf.shape
    j0 = max(0, int(math.floor(x0)))
    j1 = min(w, int(math.ceil(x1)))
    i0 = max(0, int(math.floor(y0)))
    i1 = min(h, int(math.ceil(y1)))
    if j0 >= j1 or i0 >= i1:
        return
    xs = np.arange(j0, j1, dtype=np.float64)
    ys = np.arange(i0, i1, dtype=np.float64)
    cov_x = np.clip(np.minimum(x1, xs + 1.0) - np.maximum(x0, xs), 0.0, 1.0)
    cov_y = np.clip(np.minimum(y1, ys + 1.0) - np.maximum(y0, ys), 0.0, 1.0)
    buf[i0:i1, j0:j1] += np.outer(cov_y, cov_x)
