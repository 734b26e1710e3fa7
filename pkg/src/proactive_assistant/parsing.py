"""Parsing of model output into suggestion drafts.

The provider is instructed to return a fenced JSON array of
``{type, summary, code?, explanation}`` objects. Models drift, so parsing
is lenient: a bare JSON array works, a numbered list of
``**Category**: summary`` entries works, and anything unusable is skipped
with a warning count instead of an exception. ``parse_suggestions`` is
total over arbitrary text.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field

from .categories import CATEGORY_LABELS, SuggestionCategory, parse_category

MAX_EXPLANATION_BULLETS = 4

_FENCED_RE = re.compile(r"```[^\n`]*\n(.*?)```", re.DOTALL)
_NUMBERED_SPLIT_RE = re.compile(r"^\s{0,3}\d+[.)]\s+", re.MULTILINE)
_BULLET_RE = re.compile(r"^\s*[-*+]\s+(.*)$")


@dataclass(frozen=True)
class ParsedSuggestion:
    category: SuggestionCategory
    summary: str
    code: str | None
    explanation: tuple[str, ...]


@dataclass
class ParseOutcome:
    suggestions: list[ParsedSuggestion] = field(default_factory=list)
    warnings: int = 0

    @property
    def ok(self) -> bool:
        return bool(self.suggestions)


def _ensure_label_prefix(summary: str, category: SuggestionCategory) -> str:
    label = CATEGORY_LABELS[category]
    if summary.lower().startswith(label.lower()):
        return summary
    return f"{label}: {summary}"


def _coerce_explanation(raw) -> tuple[str, ...]:
    if raw is None:
        return ()
    if isinstance(raw, str):
        items = [raw]
    elif isinstance(raw, (list, tuple)):
        items = [x for x in raw if isinstance(x, str)]
    else:
        return ()
    cleaned = [item.strip() for item in items if item.strip()]
    return tuple(cleaned[:MAX_EXPLANATION_BULLETS])


def _entry_from_object(obj, outcome: ParseOutcome) -> ParsedSuggestion | None:
    if not isinstance(obj, dict):
        outcome.warnings += 1
        return None
    category = parse_category(obj.get("type") or obj.get("category") or "")
    if category is None:
        outcome.warnings += 1
        return None
    summary = obj.get("summary")
    if not isinstance(summary, str) or not summary.strip():
        outcome.warnings += 1
        return None
    code = obj.get("code")
    if code is not None and not isinstance(code, str):
        outcome.warnings += 1
        code = None
    if isinstance(code, str) and not code.strip():
        code = None
    return ParsedSuggestion(
        category=category,
        summary=_ensure_label_prefix(summary.strip(), category),
        code=code,
        explanation=_coerce_explanation(obj.get("explanation")),
    )


def _json_candidates(raw_text: str):
    for match in _FENCED_RE.finditer(raw_text):
        yield match.group(1)
    stripped = raw_text.strip()
    if stripped:
        yield stripped
    # A JSON array embedded in prose, without fences.
    start, end = raw_text.find("["), raw_text.rfind("]")
    if 0 <= start < end:
        yield raw_text[start : end + 1]


def _try_json(raw_text: str) -> list | None:
    for candidate in _json_candidates(raw_text):
        try:
            data = json.loads(candidate)
        except (json.JSONDecodeError, RecursionError):
            continue
        if isinstance(data, dict):
            data = [data]
        if isinstance(data, list):
            return data
    return None


def _split_first_line(chunk: str) -> tuple[str, str]:
    head, _, rest = chunk.partition("\n")
    return head.strip(), rest


_HEAD_RE = re.compile(r"^\s*(?:\*\*|__)?\s*([^:*_]{1,60}?)\s*(?:\*\*|__)?\s*[:—-]\s*(.+)$")


def _entry_from_text(chunk: str, outcome: ParseOutcome) -> ParsedSuggestion | None:
    head, body = _split_first_line(chunk)
    if not head:
        outcome.warnings += 1
        return None
    match = _HEAD_RE.match(head)
    if match:
        category = parse_category(match.group(1))
        summary_text = match.group(2).strip()
    else:
        category, summary_text = None, head
    if category is None:
        # Maybe the whole head starts with a known label without a colon.
        for cat, label in CATEGORY_LABELS.items():
            if head.lower().startswith(label.lower()):
                category, summary_text = cat, head
                break
    if category is None or not summary_text:
        outcome.warnings += 1
        return None

    code_match = _FENCED_RE.search(body)
    code = code_match.group(1).rstrip("\n") if code_match else None
    if code is not None and not code.strip():
        code = None
    body_without_code = _FENCED_RE.sub("", body)
    bullets = []
    for line in body_without_code.splitlines():
        bullet = _BULLET_RE.match(line)
        if bullet and bullet.group(1).strip():
            bullets.append(bullet.group(1).strip())
    return ParsedSuggestion(
        category=category,
        summary=_ensure_label_prefix(summary_text, category),
        code=code,
        explanation=tuple(bullets[:MAX_EXPLANATION_BULLETS]),
    )


def parse_suggestions(raw_text: str, max_n: int) -> ParseOutcome:
    """Parse model output into at most ``max_n`` suggestion drafts, in order.

    Unusable entries are skipped and counted in ``warnings``; an outcome
    with no suggestions signals a parse failure. Never raises, whatever
    the input looks like.
    """
    if max_n < 1:
        raise ValueError("max_n must be >= 1")
    outcome = ParseOutcome()
    if not isinstance(raw_text, str) or not raw_text.strip():
        return outcome
    try:
        entries = _try_json(raw_text)
        if entries is not None:
            for obj in entries:
                if len(outcome.suggestions) >= max_n:
                    break
                parsed = _entry_from_object(obj, outcome)
                if parsed is not None:
                    outcome.suggestions.append(parsed)
            return outcome

        chunks = _NUMBERED_SPLIT_RE.split(raw_text)[1:]
        for chunk in chunks:
            if len(outcome.suggestions) >= max_n:
                break
            parsed = _entry_from_text(chunk, outcome)
            if parsed is not None:
                outcome.suggestions.append(parsed)
        return outcome
    except Exception:  # totality guard for fuzzed input
        outcome.suggestions.clear()
        outcome.warnings += 1
        return outcome


def extract_single_code_block(raw_text: str) -> str | None:
    """First fenced code block of a response, for integration previews."""
    if not isinstance(raw_text, str):
        return None
    match = _FENCED_RE.search(raw_text)
    if match:
        return match.group(1)
    return None
