"""Design plans: the JSON schematic bridging a user intention and design elements.

A plan has four parts: description, keywords, captions (background/objects),
and headings (heading/subheading lists). Plans are produced by a text model
through a few-shot prompt and parsed back with deliberately forgiving repairs,
because model JSON is unreliable.
"""
from __future__ import annotations

import json
from dataclasses import dataclass

from .clients.base import SamplingParams, TextGenClient
from .errors import GenerationExhausted, InsufficientExemplars, InvalidPlan, ModelOutputError
from .jsonx import canonical_json, compact_json, extract_json_object
from .rng import SplitMix64, sample


@dataclass(frozen=True)
class Intention:
    text: str

    def __post_init__(self):
        if not self.text.strip():
            raise ValueError("intention text must be non-empty")


@dataclass(frozen=True)
class Captions:
    background: str
    objects: str


@dataclass(frozen=True)
class Headings:
    heading: tuple[str, ...]
    subheading: tuple[str, ...] = ()


@dataclass(frozen=True)
class DesignPlan:
    description: str
    keywords: tuple[str, ...]
    captions: Captions
    headings: Headings


@dataclass(frozen=True)
class Exemplar:
    intention: Intention
    plan: DesignPlan


def validate_plan(plan: DesignPlan) -> None:
    """Raise InvalidPlan naming the first violated invariant."""
    if not plan.description.strip():
        raise InvalidPlan("description must be non-empty")
    if not plan.keywords:
        raise InvalidPlan("keywords must be a non-empty list")
    if any(not k.strip() for k in plan.keywords):
        raise InvalidPlan("keywords must all be non-empty")
    if not plan.captions.background.strip():
        raise InvalidPlan("captions.background must be non-empty")
    if not plan.captions.objects.strip():
        raise InvalidPlan("captions.objects must be non-empty")
    if not plan.headings.heading:
        raise InvalidPlan("headings.heading must be non-empty")


def plan_to_dict(plan: DesignPlan) -> dict:
    return {
        "description": plan.description,
        "keywords": list(plan.keywords),
        "captions": {
            "background": plan.captions.background,
            "objects": plan.captions.objects,
        },
        "headings": {
            "heading": list(plan.headings.heading),
            "subheading": list(plan.headings.subheading),
        },
    }


def serialize_plan(plan: DesignPlan) -> str:
    return canonical_json(plan_to_dict(plan))


def _as_string_list(value, field: str) -> list[str]:
    """Repair: scalars become one-element lists; keyword strings split on commas."""
    if isinstance(value, str):
        if field == "keywords" and "," in value:
            parts = [p.strip() for p in value.split(",")]
            return [p for p in parts if p]
        return [value]
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return [str(value)]
    if isinstance(value, list):
        out = []
        for item in value:
            if isinstance(item, str):
                out.append(item)
            elif isinstance(item, (int, float)) and not isinstance(item, bool):
                out.append(str(item))
            else:
                raise InvalidPlan(f"{field} contains a non-string element")
        return out
    raise InvalidPlan(f"{field} must be a list of strings")


def plan_from_dict(obj: dict) -> DesignPlan:
    """Build a plan from a raw dict, applying repairs and dropping unknown keys."""
    if "description" not in obj or not isinstance(obj["description"], str):
        raise InvalidPlan("description missing or not a string")
    if "keywords" not in obj:
        raise InvalidPlan("keywords missing")
    keywords = _as_string_list(obj["keywords"], "keywords")

    captions_obj = obj.get("captions")
    if not isinstance(captions_obj, dict):
        raise InvalidPlan("captions missing or not an object")
    background = captions_obj.get("background")
    objects = captions_obj.get("objects")
    if not isinstance(background, str) or not isinstance(objects, str):
        raise InvalidPlan("captions.background and captions.objects must be strings")

    headings_obj = obj.get("headings")
    if not isinstance(headings_obj, dict):
        raise InvalidPlan("headings missing or not an object")
    if "heading" not in headings_obj:
        raise InvalidPlan("headings.heading missing")
    heading = _as_string_list(headings_obj["heading"], "headings.heading")
    subheading = _as_string_list(headings_obj.get("subheading", []), "headings.subheading")

    plan = DesignPlan(
        description=obj["description"],
        keywords=tuple(keywords),
        captions=Captions(background=background, objects=objects),
        headings=Headings(heading=tuple(heading), subheading=tuple(subheading)),
    )
    validate_plan(plan)
    return plan


def parse_design_plan(raw: str) -> DesignPlan:
    """Extract and validate the first JSON object in a model reply.

    Raises NoJsonFound or InvalidPlan; both mean the caller should retry
    generation.
    """
    return plan_from_dict(extract_json_object(raw))


def sample_exemplars(store: list[Exemplar], k: int = 5, seed: int = 0) -> list[Exemplar]:
    """k distinct exemplars, uniform without replacement, deterministic per seed."""
    if k < 1:
        raise ValueError("k must be >= 1")
    if len(store) < k:
        raise InsufficientExemplars(f"store has {len(store)} exemplar(s), need {k}")
    return sample(store, k, SplitMix64(seed))


_PROMPT_HEADER = """You help plan graphic designs. Given a short user request, produce a design \
plan as a JSON object with exactly these keys:
  "description": one detailed sentence describing the finished design,
  "keywords": a list of short keywords (colors, objects, genre),
  "captions": {"background": "...", "objects": "..."} describing the backdrop and the \
individual objects to depict,
  "headings": {"heading": [...], "subheading": [...]} with the exact texts to place on \
the design.

Here are examples:"""


def build_icl_prompt(intention: Intention, exemplars: list[Exemplar]) -> str:
    """Deterministic few-shot prompt: instruction, exemplar pairs, then the query."""
    if not exemplars:
        raise ValueError("at least one exemplar is required")
    parts = [_PROMPT_HEADER]
    for i, ex in enumerate(exemplars, 1):
        parts.append(f"Request {i}: {ex.intention.text}")
        parts.append(f"Plan {i}: {compact_json(plan_to_dict(ex.plan))}")
    parts.append(f"Request: {intention.text}")
    parts.append("Answer with the JSON plan only, no extra text.")
    return "\n\n".join(parts)


def generate_design_plan(
    client: TextGenClient,
    intention: Intention,
    store: list[Exemplar],
    seed: int = 0,
    max_retries: int = 3,
    k: int = 5,
    sampling: SamplingParams | None = None,
) -> DesignPlan:
    """First parseable, valid plan within max_retries completions.

    Each retry re-samples exemplars with seed+attempt so the model sees a
    fresh prompt.
    """
    if max_retries < 1:
        raise ValueError("max_retries must be >= 1")
    base = sampling or SamplingParams()
    last_error: Exception | None = None
    for attempt in range(max_retries):
        exemplars = sample_exemplars(store, k=k, seed=seed + attempt)
        prompt = build_icl_prompt(intention, exemplars)
        raw = client.complete(prompt, base.with_seed(seed + attempt))
        try:
            return parse_design_plan(raw)
        except ModelOutputError as e:
            last_error = e
    raise GenerationExhausted(max_retries, last_error)


# Hand-written exemplar store used when no synthesized dataset is configured.
BUILTIN_EXEMPLARS: tuple[Exemplar, ...] = tuple(
    Exemplar(intention=Intention(text=i), plan=plan_from_dict(p))
    for i, p in [
        (
            "A banner for a weekend coffee sale at a neighborhood roastery.",
            {
                "description": "A cozy promotional banner with a steaming coffee cup on a warm beige backdrop announcing a weekend sale.",
                "keywords": ["coffee", "sale", "beige", "cozy", "banner"],
                "captions": {
                    "background": "A warm beige backdrop with soft morning light and subtle coffee bean texture.",
                    "objects": "A steaming ceramic coffee cup at the lower right with scattered roasted beans.",
                },
                "headings": {"heading": ["WEEKEND COFFEE SALE"], "subheading": ["20% off all beans"]},
            },
        ),
        (
            "Instagram post for a sunrise yoga class on the beach.",
            {
                "description": "A serene social post showing a silhouetted yoga pose against a pastel sunrise over calm ocean waves.",
                "keywords": ["yoga", "sunrise", "beach", "pastel", "wellness"],
                "captions": {
                    "background": "A pastel gradient sky at dawn over a calm ocean horizon.",
                    "objects": "A silhouetted figure in tree pose on wet sand at the lower third.",
                },
                "headings": {"heading": ["SUNRISE YOGA"], "subheading": ["Saturdays at 6am", "Bring your mat"]},
            },
        ),
        (
            "Poster for a developer conference about open source AI.",
            {
                "description": "A modern tech poster with abstract circuitry and a bold title block promoting an open source AI conference.",
                "keywords": ["conference", "technology", "AI", "open source", "blue"],
                "captions": {
                    "background": "A deep navy field with glowing abstract circuit traces fading toward the edges.",
                    "objects": "A stylized neural network medallion centered above the title area.",
                },
                "headings": {"heading": ["OPENML CONF 2025"], "subheading": ["Build in the open"]},
            },
        ),
        (
            "Flyer for a farmers market opening day with fresh produce.",
            {
                "description": "A bright flyer overflowing with fresh vegetables around a rustic wooden sign for opening day.",
                "keywords": ["farmers market", "vegetables", "green", "rustic", "flyer"],
                "captions": {
                    "background": "A sunlit green field bokeh with a light linen texture overlay.",
                    "objects": "A wooden crate of tomatoes, carrots, and leafy greens along the bottom edge.",
                },
                "headings": {"heading": ["OPENING DAY"], "subheading": ["Fresh. Local. Saturday."]},
            },
        ),
        (
            "A cover image for a jazz night event at a downtown bar.",
            {
                "description": "A moody event cover with a brass saxophone under a spotlight and art deco lettering for jazz night.",
                "keywords": ["jazz", "night", "gold", "moody", "event"],
                "captions": {
                    "background": "A smoky charcoal stage backdrop with a single warm spotlight cone.",
                    "objects": "A gleaming brass saxophone angled across the right half of the frame.",
                },
                "headings": {"heading": ["MIDNIGHT JAZZ"], "subheading": ["Live every Friday"]},
            },
        ),
        (
            "Blog header about budget travel tips for students.",
            {
                "description": "A playful wide header with a paper airplane circling landmarks on a pastel map background.",
                "keywords": ["travel", "budget", "students", "map", "pastel"],
                "captions": {
                    "background": "A pastel world map illustration with dotted flight routes.",
                    "objects": "A folded paper airplane trailing a dashed loop around tiny landmark icons.",
                },
                "headings": {"heading": ["TRAVEL FAR, SPEND LESS"], "subheading": ["12 tips for student trips"]},
            },
        ),
        (
            "Promotional post for a new vegan burger launch.",
            {
                "description": "An appetizing promo with a stacked vegan burger on a slate board against a fresh green backdrop.",
                "keywords": ["vegan", "burger", "food", "green", "launch"],
                "captions": {
                    "background": "A fresh leafy green gradient with soft studio lighting.",
                    "objects": "A tall vegan burger with lettuce and tomato on a dark slate board, centered low.",
                },
                "headings": {"heading": ["THE NEW GREEN STACK"], "subheading": ["100% plant based"]},
            },
        ),
        (
            "Winter clearance sale announcement for an outdoor gear shop.",
            {
                "description": "A crisp winter-themed sale announcement with snowy peaks and bold clearance messaging.",
                "keywords": ["winter", "clearance", "outdoor", "mountains", "sale"],
                "captions": {
                    "background": "Snow-dusted mountain peaks under a pale blue sky with drifting flakes.",
                    "objects": "A pair of crossed skis and a backpack resting in the snow at the lower left.",
                },
                "headings": {"heading": ["WINTER CLEARANCE"], "subheading": ["Up to 60% off"]},
            },
        ),
    ]
)


def exemplar_to_dict(ex: Exemplar) -> dict:
    return {"intention": ex.intention.text, "plan": plan_to_dict(ex.plan)}


def exemplar_from_dict(obj: dict) -> Exemplar:
    if not isinstance(obj.get("intention"), str):
        raise InvalidPlan("exemplar intention must be a string")
    if not isinstance(obj.get("plan"), dict):
        raise InvalidPlan("exemplar plan must be an object")
    return Exemplar(intention=Intention(text=obj["intention"]), plan=plan_from_dict(obj["plan"]))


def load_exemplar_store(path) -> list[Exemplar]:
    """Read a JSON-lines exemplar store ({"intention", "plan"} per line)."""
    store = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                store.append(exemplar_from_dict(json.loads(line)))
    return store
