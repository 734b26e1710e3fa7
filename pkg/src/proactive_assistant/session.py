"""Session domain types: documents, chat messages, suggestions, run results.

State transitions live in ``runtime.SessionRuntime``; these types stay
plain data so they serialize cleanly for telemetry and push frames.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass, field

from .categories import SuggestionCategory
from .conditions import ConditionConfig
from .errors import BadStateError

_CODE_BLOCK_RE = re.compile(r"```[^\n`]*\n(.*?)```", re.DOTALL)


def extract_code_blocks(text: str) -> list[str]:
    """Pull the contents of fenced code blocks out of markdown-ish text."""
    return [m.group(1).rstrip("\n") for m in _CODE_BLOCK_RE.finditer(text)]


class ChatRole(enum.Enum):
    USER = "user"
    ASSISTANT = "assistant"
    ACCEPTED_SUGGESTION = "accepted_suggestion"


@dataclass
class ChatMessage:
    role: ChatRole
    content: str
    code_blocks: list[str] = field(default_factory=list)
    ts_ms: int = 0
    # Set on accepted_suggestion messages: the suggestion this came from.
    suggestion_id: str | None = None

    def to_payload(self) -> dict:
        payload = {
            "role": self.role.value,
            "content": self.content,
            "code_blocks": list(self.code_blocks),
            "ts_ms": self.ts_ms,
        }
        if self.suggestion_id is not None:
            payload["suggestion_id"] = self.suggestion_id
        return payload


@dataclass
class CodeDocument:
    doc_id: str
    text: str
    version: int = 1


class SuggestionState(enum.Enum):
    COLLAPSED = "collapsed"
    EXPANDED = "expanded"
    ACCEPTED = "accepted"
    DELETED = "deleted"


TERMINAL_STATES = frozenset({SuggestionState.ACCEPTED, SuggestionState.DELETED})


class SuggestionOrigin(enum.Enum):
    PROACTIVE_STANDARD = "proactive_standard"
    PROACTIVE_DEBUG = "proactive_debug"
    MANUAL_REQUEST = "manual_request"


@dataclass
class Suggestion:
    suggestion_id: str
    category: SuggestionCategory
    summary: str
    code: str | None
    explanation: list[str]
    origin: SuggestionOrigin
    batch_id: str
    state: SuggestionState = SuggestionState.COLLAPSED

    def transition(self, new_state: SuggestionState) -> None:
        """Move along the lifecycle; terminal states never come back."""
        allowed = {
            SuggestionState.COLLAPSED: {SuggestionState.EXPANDED},
            SuggestionState.EXPANDED: {
                SuggestionState.COLLAPSED,
                SuggestionState.ACCEPTED,
                SuggestionState.DELETED,
            },
            SuggestionState.ACCEPTED: set(),
            SuggestionState.DELETED: set(),
        }[self.state]
        if new_state not in allowed:
            raise BadStateError(
                f"suggestion {self.suggestion_id}: cannot go {self.state.value} -> {new_state.value}"
            )
        self.state = new_state

    def to_payload(self) -> dict:
        return {
            "suggestion_id": self.suggestion_id,
            "category": self.category.value,
            "summary": self.summary,
            "code": self.code,
            "explanation": list(self.explanation),
            "origin": self.origin.value,
            "state": self.state.value,
            "batch_id": self.batch_id,
        }


@dataclass
class RunResult:
    stdout: str
    stderr: str
    exit_status: int
    is_error: bool

    def to_payload(self) -> dict:
        return {
            "stdout": self.stdout,
            "stderr": self.stderr,
            "exit_status": self.exit_status,
            "is_error": self.is_error,
        }


# Default heuristic for "the output looks like an error" even on exit 0.
DEFAULT_ERROR_PATTERN = r"Traceback \(most recent call last\)|\b[A-Za-z_]*(?:Error|Exception)\b"


def make_run_result(
    stdout: str, stderr: str, exit_status: int, error_pattern: str = DEFAULT_ERROR_PATTERN
) -> RunResult:
    is_error = exit_status != 0 or bool(re.search(error_pattern, stderr))
    return RunResult(stdout=stdout, stderr=stderr, exit_status=exit_status, is_error=is_error)


@dataclass
class Session:
    """Per-session mutable record; owned and mutated only by SessionRuntime."""

    session_id: str
    condition: ConditionConfig
    created_at_ms: int
    documents: list[CodeDocument] = field(default_factory=list)
    chat: list[ChatMessage] = field(default_factory=list)
    suggestions: list[Suggestion] = field(default_factory=list)
    last_run: RunResult | None = None
    task_id: str | None = None

    def document(self, doc_id: str) -> CodeDocument | None:
        for doc in self.documents:
            if doc.doc_id == doc_id:
                return doc
        return None

    def find_suggestion(self, suggestion_id: str) -> Suggestion | None:
        for s in self.suggestions:
            if s.suggestion_id == suggestion_id:
                return s
        return None

    def live_suggestions(self) -> list[Suggestion]:
        return [s for s in self.suggestions if s.state not in TERMINAL_STATES]
