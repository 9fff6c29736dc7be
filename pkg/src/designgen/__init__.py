"""designgen: an intention-to-graphic-design pipeline.

Stages: design plan generation (few-shot text model), text-free design
image generation, typography generation (multimodal model), and a
deterministic renderer that composes the final design. Ships dataset
synthesis tooling and a judge-based evaluation harness around the core.
"""

from .document import Canvas, DesignDocument, ImageLayer, TextLayer, parse_document, serialize_document, strip_text_layers
from .image import RasterImage
from .plan import DesignPlan, Exemplar, Intention, generate_design_plan, parse_design_plan
from .typography import TypographySpec, generate_typography, parse_typography, repair_spec
from .raster import render_document, render_final
from .fonts import FontCatalog

__version__ = "0.1.0"

__all__ = [
    "Canvas",
    "DesignDocument",
    "ImageLayer",
    "TextLayer",
    "parse_document",
    "serialize_document",
    "strip_text_layers",
    "RasterImage",
    "DesignPlan",
    "Exemplar",
    "Intention",
    "generate_design_plan",
    "parse_design_plan",
    "TypographySpec",
    "generate_typography",
    "parse_typography",
    "repair_spec",
    "render_document",
    "render_final",
    "FontCatalog",
    "__version__",
]
