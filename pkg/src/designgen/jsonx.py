"""Canonical JSON serialization and tolerant JSON extraction from model output.

Canonical form: lexicographically sorted keys, floats limited to 6 decimal
places with integral values emitted as integers, 2-space indent, trailing
newline. Serializing, re-parsing, and serializing again is byte-stable.
"""
from __future__ import annotations

import ast
import json
import re
from typing import Any

from .errors import NoJsonFound

_FENCE_RE = re.compile(r"```[a-zA-Z]*\s*(.*?)```", re.DOTALL)


def _canon(value: Any) -> Any:
    if isinstance(value, bool):
        return value
    if isinstance(value, float):
        v = round(value, 6)
        if v == int(v) and abs(v) < 2**53:
            return int(v)
        return v
    if isinstance(value, dict):
        return {str(k): _canon(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_canon(v) for v in value]
    return value


def canonical_json(obj: Any) -> str:
    """Pretty canonical form used for files on disk."""
    return json.dumps(_canon(obj), sort_keys=True, ensure_ascii=False, indent=2) + "\n"


def canonical_json_bytes(obj: Any) -> bytes:
    return canonical_json(obj).encode("utf-8")


def compact_json(obj: Any) -> str:
    """Single-line canonical form used inside prompts."""
    return json.dumps(_canon(obj), sort_keys=True, ensure_ascii=False, separators=(",", ":"))


def _balanced_block(text: str, start: int) -> str | None:
    depth = 0
    in_str: str | None = None
    escaped = False
    for i in range(start, len(text)):
        ch = text[i]
        if in_str is not None:
            if escaped:
                escaped = False
            elif ch == "\\":
                escaped = True
            elif ch == in_str:
                in_str = None
            continue
        if ch in "\"'":
            in_str = ch
        elif ch == "{":
            depth += 1
        elif ch == "}":
            depth -= 1
            if depth == 0:
                return text[start : i + 1]
    return None


def _try_load(block: str) -> dict | None:
    try:
        val = json.loads(block)
    except json.JSONDecodeError:
        # Model output often uses Python-style quoting/trailing commas.
        try:
            val = ast.literal_eval(block)
        except (ValueError, SyntaxError):
            return None
    return val if isinstance(val, dict) else None


def _first_object(text: str) -> dict | None:
    start = text.find("{")
    while start != -1:
        block = _balanced_block(text, start)
        if block is not None:
            val = _try_load(block)
            if val is not None:
                return val
        start = text.find("{", start + 1)
    return None


def extract_json_object(raw: str) -> dict:
    """First JSON object in raw text, tolerating code fences and prose.

    Fenced blocks are preferred over bare text. Raises NoJsonFound when no
    parseable object exists anywhere in the input.
    """
    for m in _FENCE_RE.finditer(raw):
        inner = m.group(1)
        if "{" in inner:
            val = _first_object(inner)
            if val is not None:
                return val
    val = _first_object(raw)
    if val is None:
        raise NoJsonFound("no JSON object in model output")
    return val
