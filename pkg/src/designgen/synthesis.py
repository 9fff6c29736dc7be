"""Exemplar-dataset synthesis from a corpus of design documents.

Each document yields one (intention, plan) exemplar: the plan is assembled
piece by piece — one multimodal extraction per plan item against a rendered
preview — and the intention is written by the text service from the document
metadata. Progress is journaled per (document, stage) so long runs survive
interruption without re-issuing completed model calls.
"""
from __future__ import annotations

import hashlib
import json
import logging
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from .clients.base import MultimodalClient, SamplingParams, TextGenClient
from .document import DesignDocument, strip_text_layers
from .errors import GenerationExhausted, MissingFragment, ModelOutputError
from .fonts import FontCatalog
from .image import RasterImage
from .imagegen import assemble_image_prompt
from .jsonx import extract_json_object
from .plan import DesignPlan, Exemplar, Intention, plan_from_dict
from .raster import AssetResolver, render_document

log = logging.getLogger(__name__)

DEFAULT_MIN_AREA_PX = 500_000

PLAN_ITEM_ORDER = ("description", "keywords", "captions", "headings")


@dataclass(frozen=True)
class ExtractionItem:
    kind: str
    prompt_template: str


EXTRACTION_ITEMS: dict[str, ExtractionItem] = {
    "description": ExtractionItem(
        "description",
        'Look at this graphic design and write one detailed sentence describing the whole '
        'composition: the subject, the context, and the overall look. '
        'Reply as JSON: {"description": "..."}',
    ),
    "keywords": ExtractionItem(
        "keywords",
        'Look at this graphic design and list 3 to 8 short keywords covering its colors, '
        'objects, and genre. Reply as JSON: {"keywords": ["...", "..."]}',
    ),
    "captions": ExtractionItem(
        "captions",
        'Look at this graphic design and caption it in two parts: the backdrop behind the '
        'main subject, and the individual objects with where they sit. '
        'Reply as JSON: {"captions": {"background": "...", "objects": "..."}}',
    ),
    "headings": ExtractionItem(
        "headings",
        'Look at this graphic design and transcribe its display texts: the most prominent '
        'lines as headings, the rest as subheadings. '
        'Reply as JSON: {"headings": {"heading": ["..."], "subheading": ["..."]}}',
    ),
}


@dataclass(frozen=True)
class TrainingPair:
    prompt_text: str
    target_image_ref: str
    source_doc_id: str


def _validate_fragment(kind: str, obj: dict) -> dict:
    """Validate one extraction reply against its sub-schema; returns {kind: value}."""
    if kind not in obj:
        raise ModelOutputError(f"fragment missing key {kind!r}")
    merged = plan_from_dict(
        {
            "description": "placeholder",
            "keywords": ["placeholder"],
            "captions": {"background": "placeholder", "objects": "placeholder"},
            "headings": {"heading": ["placeholder"]},
            kind: obj[kind],
        }
    )
    value = {
        "description": merged.description,
        "keywords": list(merged.keywords),
        "captions": {"background": merged.captions.background, "objects": merged.captions.objects},
        "headings": {
            "heading": list(merged.headings.heading),
            "subheading": list(merged.headings.subheading),
        },
    }[kind]
    return {kind: value}


def extract_plan_item(
    client: MultimodalClient,
    image: RasterImage,
    item: ExtractionItem,
    seed: int = 0,
    max_retries: int = 3,
    sampling: SamplingParams | None = None,
) -> dict:
    """One plan item from the preview image; retries on unusable replies."""
    base = sampling or SamplingParams()
    last_error: Exception | None = None
    for attempt in range(max_retries):
        raw = client.complete(image, item.prompt_template, base.with_seed(seed + attempt))
        try:
            return _validate_fragment(item.kind, extract_json_object(raw))
        except ModelOutputError as e:
            last_error = e
    raise GenerationExhausted(max_retries, last_error)


def merge_extractions(fragments: dict[str, dict]) -> DesignPlan:
    """Combine the four per-item fragments into one validated plan."""
    merged: dict = {}
    for kind in PLAN_ITEM_ORDER:
        fragment = fragments.get(kind)
        if fragment is None or kind not in fragment:
            raise MissingFragment(kind)
        merged[kind] = fragment[kind]
    return plan_from_dict(merged)


INTENTION_EXAMPLES = (
    "A flyer for a spring plant sale at the community garden.",
    "Social media post announcing a two-for-one pizza night.",
    "A minimalist cover image for a podcast about personal finance.",
)


def build_intention_prompt(meta: dict, texts: list[str]) -> str:
    """Prompt asking for a one-sentence user intention behind a document.

    Missing metadata fields render as "unknown".
    """

    def field_of(key: str) -> str:
        value = meta.get(key)
        if isinstance(value, (list, tuple)):
            value = ", ".join(str(v) for v in value)
        value = str(value).strip() if value is not None else ""
        return value if value else "unknown"

    lines = [
        "Write the short request a customer might have given a designer that led to this "
        "design. One sentence, plain language. Examples of such requests:",
    ]
    lines.extend(f"- {example}" for example in INTENTION_EXAMPLES)
    lines.append("")
    lines.append(f"title: {field_of('title')}")
    lines.append(f"format: {field_of('format')}")
    lines.append(f"keywords: {field_of('keywords')}")
    texts_value = "; ".join(t.replace("\n", " ") for t in texts) if texts else "unknown"
    lines.append(f"texts: {texts_value}")
    lines.append("")
    lines.append("Reply with the request sentence only.")
    return "\n".join(lines)


def make_training_pair(
    doc: DesignDocument,
    plan: DesignPlan,
    fonts: FontCatalog,
    assets: AssetResolver,
    min_area_px: int = DEFAULT_MIN_AREA_PX,
    images_dir: Path | str | None = None,
) -> TrainingPair | None:
    """Render the text-free target image and pair it with the caption prompt.

    Documents whose canvas area is strictly under min_area_px are filtered
    (returns None).
    """
    if doc.canvas.area_px < min_area_px:
        return None
    target = render_document(strip_text_layers(doc), assets, fonts)
    ref = f"{doc.id}.png"
    if images_dir is not None:
        out = Path(images_dir)
        out.mkdir(parents=True, exist_ok=True)
        target.save_png(out / ref)
        ref = str(out / ref)
    return TrainingPair(
        prompt_text=assemble_image_prompt(plan),
        target_image_ref=ref,
        source_doc_id=doc.id,
    )


class ProgressJournal:
    """Append-only JSON-lines journal keyed by (doc_id, stage).

    A truncated final line (from an interrupted run) is tolerated and
    ignored on load. Writes are flushed per entry.
    """

    def __init__(self, path: Path | str):
        self.path = Path(path)
        self._lock = threading.Lock()
        self._entries: dict[tuple[str, str], dict] = {}
        if self.path.is_file():
            for line in self.path.read_text("utf-8").splitlines():
                line = line.strip()
                if not line:
                    continue
                try:
                    entry = json.loads(line)
                except json.JSONDecodeError:
                    log.warning("ignoring unparsable journal line in %s", self.path)
                    continue
                self._entries[(entry["doc_id"], entry["stage"])] = entry

    def get(self, doc_id: str, stage: str) -> dict | None:
        with self._lock:
            return self._entries.get((doc_id, stage))

    def record(self, doc_id: str, stage: str, ok: bool, data=None, error: str | None = None) -> dict:
        entry = {"doc_id": doc_id, "stage": stage, "ok": ok}
        if data is not None:
            entry["data"] = data
        if error is not None:
            entry["error"] = error
        with self._lock:
            if (doc_id, stage) in self._entries:
                raise ValueError(f"duplicate journal key ({doc_id}, {stage})")
            self._entries[(doc_id, stage)] = entry
            self.path.parent.mkdir(parents=True, exist_ok=True)
            with open(self.path, "a", encoding="utf-8") as fh:
                fh.write(json.dumps(entry) + "\n")
                fh.flush()
        return entry

    def keys(self) -> list[tuple[str, str]]:
        with self._lock:
            return list(self._entries)


@dataclass
class FailureRecord:
    doc_id: str
    stage: str
    error: str


@dataclass
class SynthesisOutcome:
    exemplars: list[tuple[str, Exemplar]] = field(default_factory=list)
    failures: list[FailureRecord] = field(default_factory=list)
    stages_from_journal: int = 0
    docs_fully_journaled: int = 0


def _doc_seed(base_seed: int, doc_id: str) -> int:
    h = hashlib.sha256(f"{base_seed}:{doc_id}".encode("utf-8")).digest()
    return int.from_bytes(h[:8], "big") >> 1


@dataclass
class _DocResult:
    doc_id: str
    exemplar: Exemplar | None
    failure: FailureRecord | None
    journal_hits: int
    client_calls: int


def _extract_stage(
    journal: ProgressJournal,
    doc: DesignDocument,
    preview: RasterImage,
    kind: str,
    mm_client: MultimodalClient,
    seed: int,
    max_retries: int,
    result: _DocResult,
) -> dict | None:
    stage = f"extract:{kind}"
    entry = journal.get(doc.id, stage)
    if entry is not None:
        result.journal_hits += 1
        if entry["ok"]:
            return entry["data"]
        result.failure = FailureRecord(doc.id, stage, entry.get("error", "failed"))
        return None
    result.client_calls += 1
    try:
        fragment = extract_plan_item(
            mm_client, preview, EXTRACTION_ITEMS[kind], seed=seed, max_retries=max_retries
        )
    except GenerationExhausted as e:
        journal.record(doc.id, stage, ok=False, error=str(e))
        result.failure = FailureRecord(doc.id, stage, str(e))
        return None
    journal.record(doc.id, stage, ok=True, data=fragment)
    return fragment


def _intention_stage(
    journal: ProgressJournal,
    doc: DesignDocument,
    text_client: TextGenClient,
    seed: int,
    max_retries: int,
    result: _DocResult,
) -> str | None:
    entry = journal.get(doc.id, "intention")
    if entry is not None:
        result.journal_hits += 1
        if entry["ok"]:
            return entry["data"]
        result.failure = FailureRecord(doc.id, "intention", entry.get("error", "failed"))
        return None
    prompt = build_intention_prompt(
        {"title": doc.title, "format": doc.format, "keywords": doc.keywords},
        [l.text for l in doc.layers if hasattr(l, "text")],
    )
    result.client_calls += 1
    sampling = SamplingParams()
    text = ""
    for attempt in range(max_retries):
        raw = text_client.complete(prompt, sampling.with_seed(seed + attempt))
        text = " ".join(raw.split())
        if text:
            break
    if not text:
        error = "empty intention reply"
        journal.record(doc.id, "intention", ok=False, error=error)
        result.failure = FailureRecord(doc.id, "intention", error)
        return None
    journal.record(doc.id, "intention", ok=True, data=text)
    return text


def _process_document(
    doc: DesignDocument,
    text_client: TextGenClient,
    mm_client: MultimodalClient,
    fonts: FontCatalog,
    assets: AssetResolver,
    journal: ProgressJournal,
    seed: int,
    max_retries: int,
) -> _DocResult:
    result = _DocResult(doc.id, None, None, journal_hits=0, client_calls=0)
    doc_seed = _doc_seed(seed, doc.id)

    needs_preview = any(
        journal.get(doc.id, f"extract:{kind}") is None for kind in PLAN_ITEM_ORDER
    )
    preview = render_document(doc, assets, fonts) if needs_preview else None

    fragments: dict[str, dict] = {}
    for i, kind in enumerate(PLAN_ITEM_ORDER):
        fragment = _extract_stage(
            journal, doc, preview, kind, mm_client, doc_seed + i * 101, max_retries, result
        )
        if fragment is None:
            return result
        fragments[kind] = fragment
    plan = merge_extractions(fragments)

    intention_text = _intention_stage(
        journal, doc, text_client, doc_seed + 997, max_retries, result
    )
    if intention_text is None:
        return result
    result.exemplar = Exemplar(intention=Intention(text=intention_text), plan=plan)
    return result


def build_exemplar_store(
    corpus: list[DesignDocument],
    text_client: TextGenClient,
    mm_client: MultimodalClient,
    fonts: FontCatalog,
    assets: AssetResolver,
    journal: ProgressJournal,
    seed: int = 0,
    max_retries: int = 3,
    workers: int = 1,
) -> SynthesisOutcome:
    """Synthesize one exemplar per document, resuming from the journal.

    Per-document failures are recorded, never raised; an interrupt
    propagates after in-flight journal writes complete.
    """
    outcome = SynthesisOutcome()
    results: list[_DocResult | None] = [None] * len(corpus)

    def work(index: int) -> _DocResult:
        return _process_document(
            corpus[index], text_client, mm_client, fonts, assets, journal, seed, max_retries
        )

    executor = ThreadPoolExecutor(max_workers=max(1, workers))
    try:
        futures = [executor.submit(work, i) for i in range(len(corpus))]
        for i, future in enumerate(futures):
            results[i] = future.result()
    except BaseException:
        executor.shutdown(wait=False, cancel_futures=True)
        raise
    executor.shutdown(wait=True)

    for result in results:
        assert result is not None
        outcome.stages_from_journal += result.journal_hits
        if result.client_calls == 0 and result.journal_hits > 0:
            outcome.docs_fully_journaled += 1
        if result.exemplar is not None:
            outcome.exemplars.append((result.doc_id, result.exemplar))
        elif result.failure is not None:
            outcome.failures.append(result.failure)
    return outcome
