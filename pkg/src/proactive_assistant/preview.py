"""Integration previews.

A preview is the model's merge of one suggestion into the current code,
shown to the user as a line diff they can accept in full, in part, or
hide. The original text is pinned by a content hash; if the document
changes under the preview, acceptance fails as stale and the user must
re-preview.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field

from .diffing import DiffHunk, apply_hunks, compute_diff
from .errors import ProviderError, StalePreviewError, ValidationError
from .parsing import extract_single_code_block


def content_hash(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


@dataclass(frozen=True)
class PreviewResult:
    preview_id: str
    suggestion_id: str
    original_text: str
    proposed_text: str
    hunks: tuple[DiffHunk, ...]
    provider_latency_ms: int
    original_hash: str = field(default="")

    def __post_init__(self) -> None:
        if not self.original_hash:
            object.__setattr__(self, "original_hash", content_hash(self.original_text))

    @property
    def is_noop(self) -> bool:
        return not self.hunks

    def is_fresh(self, current_text: str) -> bool:
        return content_hash(current_text) == self.original_hash

    def to_payload(self) -> dict:
        return {
            "preview_id": self.preview_id,
            "suggestion_id": self.suggestion_id,
            "original_text": self.original_text,
            "proposed_text": self.proposed_text,
            "hunks": [hunk.to_payload() for hunk in self.hunks],
            "provider_latency_ms": self.provider_latency_ms,
            "no_changes": self.is_noop,
        }

    def select_hunks(self, selected: list[int] | None) -> list[DiffHunk]:
        if selected is None:
            return list(self.hunks)
        picked = []
        for index in selected:
            if not isinstance(index, int) or not 0 <= index < len(self.hunks):
                raise ValidationError(f"selected hunk index out of range: {index!r}")
            picked.append(self.hunks[index])
        return picked

    def merged_text(
        self,
        current_text: str,
        selected: list[int] | None = None,
        final_text: str | None = None,
    ) -> str:
        """Text the document should take on acceptance.

        ``final_text`` wins when the user edited the proposed pane before
        accepting. Raises StalePreviewError if the document moved since
        the preview was computed.
        """
        if not self.is_fresh(current_text):
            raise StalePreviewError("code changed since this preview was computed")
        if final_text is not None:
            return final_text
        return apply_hunks(self.original_text, self.select_hunks(selected))


def build_preview(
    preview_id: str,
    suggestion_id: str,
    original_text: str,
    raw_response: str,
    provider_latency_ms: int,
) -> PreviewResult:
    """Turn an integration response into a PreviewResult.

    The provider must answer with the whole merged file in one fenced
    code block; anything else is a provider error and the suggestion is
    left untouched.
    """
    proposed = extract_single_code_block(raw_response)
    if proposed is None:
        raise ProviderError("integration response contained no code block")
    # The newline before the closing fence belongs to the fence.
    if proposed.endswith("\n"):
        proposed = proposed[:-1]
    hunks = compute_diff(original_text, proposed)
    return PreviewResult(
        preview_id=preview_id,
        suggestion_id=suggestion_id,
        original_text=original_text,
        proposed_text=proposed,
        hunks=tuple(hunks),
        provider_latency_ms=provider_latency_ms,
    )
