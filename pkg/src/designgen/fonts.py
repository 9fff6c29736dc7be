"""Font faces and the catalog that maps family names to them.

Two face kinds:
  * SyntheticFace — metrics declared in a JSON description file; glyphs
    render as solid blocks filling their advance cell. Deterministic by
    construction, used as the default and by every metric oracle.
  * TrueTypeFace — outline fonts via Pillow/FreeType for real designs.

All metrics are stored at unit size and scale linearly with font_size_px.
"""
from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np

from .errors import ConfigError

log = logging.getLogger(__name__)

DEFAULT_FAMILY = "BlockMono"


@dataclass(frozen=True)
class FaceMetrics:
    """Per-face vertical metrics at unit size."""

    ascent: float
    descent: float
    line_gap: float = 0.0


@dataclass(frozen=True)
class GlyphRect:
    """Axis-aligned ink rect relative to (pen_x=0, baseline=0)."""

    x0: float
    y0: float
    x1: float
    y1: float


@dataclass(frozen=True)
class GlyphBitmap:
    """Coverage bitmap placed at integer offset from (pen_x, baseline)."""

    dx: int
    dy: int
    coverage: np.ndarray  # float in [0, 1]


class SyntheticFace:
    """Block-glyph face defined by a JSON metrics description."""

    def __init__(
        self,
        family: str,
        metrics: FaceMetrics,
        advances: dict[str, float],
        notdef_advance: float = 0.5,
        no_ink: frozenset[str] = frozenset(" "),
    ):
        if metrics.ascent <= 0:
            raise ValueError("ascent must be positive")
        self.family = family
        self.metrics = metrics
        self._advances = dict(advances)
        self.notdef_advance = notdef_advance
        self._no_ink = frozenset(no_ink)

    @classmethod
    def from_description(cls, desc: dict) -> "SyntheticFace":
        return cls(
            family=desc["family"],
            metrics=FaceMetrics(
                ascent=float(desc["ascent"]),
                descent=float(desc["descent"]),
                line_gap=float(desc.get("line_gap", 0.0)),
            ),
            advances={k: float(v) for k, v in desc["advances"].items()},
            notdef_advance=float(desc.get("notdef_advance", 0.5)),
            no_ink=frozenset(desc.get("no_ink", [" "])),
        )

    @classmethod
    def load(cls, path) -> "SyntheticFace":
        with open(path, "r", encoding="utf-8") as fh:
            return cls.from_description(json.load(fh))

    def has_glyph(self, ch: str) -> bool:
        return ch in self._advances

    def advance(self, ch: str) -> float:
        """Unit advance; missing glyphs fall back to the notdef advance."""
        return self._advances.get(ch, self.notdef_advance)

    def render_glyph(self, ch: str, size: float) -> GlyphRect | None:
        if ch in self._no_ink:
            return None
        adv = self.advance(ch)
        return GlyphRect(0.0, -self.metrics.ascent * size, adv * size, self.metrics.descent * size)


class TrueTypeFace:
    """Outline font wrapper. Advances are measured at a large reference size
    so layout scales linearly, matching the synthetic contract."""

    _REF_SIZE = 256

    def __init__(self, family: str, path: str):
        from PIL import ImageFont

        self.family = family
        self._path = path
        self._ref = ImageFont.truetype(path, self._REF_SIZE)
        ascent, descent = self._ref.getmetrics()
        self.metrics = FaceMetrics(ascent / self._REF_SIZE, descent / self._REF_SIZE)
        self._size_cache: dict[int, object] = {}
        self._advance_cache: dict[str, float] = {}
        self.notdef_advance = self.metrics.ascent * 0.6

    def _at_size(self, size: float):
        from PIL import ImageFont

        px = max(1, int(round(size)))
        font = self._size_cache.get(px)
        if font is None:
            font = ImageFont.truetype(self._path, px)
            self._size_cache[px] = font
        return font

    def has_glyph(self, ch: str) -> bool:
        return True  # FreeType substitutes notdef internally

    def advance(self, ch: str) -> float:
        adv = self._advance_cache.get(ch)
        if adv is None:
            adv = self._ref.getlength(ch) / self._REF_SIZE
            self._advance_cache[ch] = adv
        return adv

    def render_glyph(self, ch: str, size: float) -> GlyphBitmap | None:
        if ch.isspace():
            return None
        font = self._at_size(size)
        mask = font.getmask(ch, mode="L")
        if mask.size[0] == 0 or mask.size[1] == 0:
            return None
        cov = np.asarray(mask, dtype=np.float64).reshape(mask.size[1], mask.size[0]) / 255.0
        bbox = font.getbbox(ch)
        ascent_px = font.getmetrics()[0]
        return GlyphBitmap(dx=int(bbox[0]), dy=int(bbox[1]) - ascent_px, coverage=cov)


FontFace = SyntheticFace | TrueTypeFace


class FontCatalog:
    """Family-name lookup with a guaranteed default face."""

    def __init__(self, faces: dict[str, FontFace], default_family: str):
        if default_family not in faces:
            raise ConfigError(f"default font family '{default_family}' not in catalog")
        self._faces = dict(faces)
        self.default_family = default_family

    @property
    def families(self) -> frozenset[str]:
        return frozenset(self._faces)

    def __contains__(self, family: str) -> bool:
        return family in self._faces

    def face(self, family: str) -> FontFace:
        return self._faces[family]

    def resolve(self, family: str) -> FontFace:
        """Face for the family, or the default face when unknown."""
        return self._faces.get(family, self._faces[self.default_family])

    def with_faces(self, extra: dict[str, FontFace]) -> "FontCatalog":
        merged = dict(self._faces)
        merged.update(extra)
        return FontCatalog(merged, self.default_family)

    @classmethod
    def bundled(cls) -> "FontCatalog":
        """Catalog of the synthetic faces shipped with the package."""
        faces: dict[str, FontFace] = {}
        root = resources.files("designgen").joinpath("data/fonts")
        for entry in sorted(root.iterdir(), key=lambda e: e.name):
            if entry.name.endswith(".json"):
                face = SyntheticFace.from_description(json.loads(entry.read_text("utf-8")))
                faces[face.family] = face
        return cls(faces, DEFAULT_FAMILY)

    @classmethod
    def load_dir(cls, font_dir, default_family: str | None = None) -> "FontCatalog":
        """Bundled faces plus every .json/.ttf/.otf face found in font_dir."""
        base = cls.bundled()
        extra: dict[str, FontFace] = {}
        d = Path(font_dir)
        if not d.is_dir():
            raise ConfigError(f"font directory not found: {font_dir}")
        for p in sorted(d.iterdir()):
            try:
                if p.suffix == ".json":
                    face = SyntheticFace.load(p)
                elif p.suffix.lower() in (".ttf", ".otf"):
                    face = TrueTypeFace(p.stem, str(p))
                else:
                    continue
            except Exception as e:
                log.warning("skipping font %s: %s", p, e)
                continue
            extra[face.family] = face
        catalog = base.with_faces(extra)
        if default_family is not None:
            if default_family not in catalog:
                raise ConfigError(f"default font family '{default_family}' not in catalog")
            catalog = FontCatalog({f: catalog.face(f) for f in catalog.families}, default_family)
        return catalog
