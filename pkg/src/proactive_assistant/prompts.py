"""Prompt assembly for standard, debugging, and plain-chat provider calls.

A ``PromptBundle`` is the provider-independent request shape: an ordered
list of segments, each tagged ``system``, ``history``, or ``instruction``.
History segments keep their original chat role so HTTP providers can map
them onto a chat-completions message list.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

from .categories import CATEGORY_LABELS, DEBUG_CATEGORIES, SuggestionCategory
from .conditions import ConditionConfig
from .errors import ContractError
from .session import ChatMessage, ChatRole, RunResult

STDERR_TAIL_BYTES = 8 * 1024
STDOUT_TAIL_BYTES = 2 * 1024
TRUNCATION_MARKER = "[... earlier output truncated ...]\n"


class SegmentKind(enum.Enum):
    SYSTEM = "system"
    HISTORY = "history"
    INSTRUCTION = "instruction"


class PromptKind(enum.Enum):
    STANDARD = "standard"
    DEBUG = "debug"
    CHAT = "chat"


@dataclass(frozen=True)
class PromptSegment:
    kind: SegmentKind
    content: str
    chat_role: str | None = None  # history segments: "user" or "assistant"


@dataclass(frozen=True)
class PromptBundle:
    kind: PromptKind
    segments: tuple[PromptSegment, ...]
    max_suggestions: int

    def text(self) -> str:
        """Flat rendering, used for hashing and by single-string providers."""
        parts = []
        for seg in self.segments:
            role = seg.chat_role or seg.kind.value
            parts.append(f"[{role}]\n{seg.content}")
        return "\n\n".join(parts)

    def to_payload(self) -> dict:
        return {
            "kind": self.kind.value,
            "max_suggestions": self.max_suggestions,
            "segments": [
                {"kind": s.kind.value, "chat_role": s.chat_role, "content": s.content}
                for s in self.segments
            ],
        }


def _render_message(msg: ChatMessage) -> tuple[str, str]:
    """Map a chat message to (chat_role, content) for the provider."""
    if msg.role is ChatRole.ACCEPTED_SUGGESTION:
        return "user", f"I accepted this suggestion from you:\n{msg.content}"
    return msg.role.value, msg.content


def history_segments(chat: list[ChatMessage], limit: int) -> list[PromptSegment]:
    segments = []
    for msg in chat[-limit:]:
        role, content = _render_message(msg)
        segments.append(PromptSegment(SegmentKind.HISTORY, content, chat_role=role))
    return segments


def _format_directions(max_suggestions: int, allowed: tuple[SuggestionCategory, ...]) -> str:
    type_lines = "\n".join(f"- {cat.value}: {CATEGORY_LABELS[cat]}" for cat in allowed)
    return (
        f"Respond with a fenced ```json code block containing a JSON array of at most "
        f"{max_suggestions} suggestion objects, ordered from most to least useful. "
        "Each object has these fields:\n"
        '- "type": one of the identifiers listed below\n'
        '- "summary": one sentence that starts with the matching type label\n'
        '- "code": a code snippet implementing the suggestion (omit when not applicable)\n'
        '- "explanation": an array of at most 4 short bullet strings\n'
        "Allowed types:\n"
        f"{type_lines}\n"
        "Return nothing outside the fenced JSON block."
    )


_TAXONOMY_SCAFFOLD = (
    "You are a proactive programming assistant embedded in a code editor. "
    "Without being asked, you offer a small set of concretely useful next steps "
    "based on the programmer's current code and recent conversation. "
    "Do not repeat questions the programmer already asked or suggestions they already "
    "accepted or dismissed.\n"
    "Consider the full range of ways you can help:\n"
    + "\n".join(f"- {CATEGORY_LABELS[cat]}" for cat in SuggestionCategory)
)


def build_standard_prompt(
    chat: list[ChatMessage], code_text: str, cfg: ConditionConfig
) -> PromptBundle:
    """Assemble the periodic-suggestion prompt from history, scaffold, and code."""
    segments: list[PromptSegment] = []
    if cfg.guiding_prompts:
        segments.append(PromptSegment(SegmentKind.SYSTEM, _TAXONOMY_SCAFFOLD))
    segments.extend(history_segments(chat, cfg.history_limit))
    instruction = (
        "The programmer's current code is:\n"
        f"```\n{code_text}\n```\n\n"
        f"Propose up to {cfg.suggestions_per_batch} suggestions for what they could do next.\n\n"
        + _format_directions(cfg.suggestions_per_batch, tuple(SuggestionCategory))
    )
    segments.append(PromptSegment(SegmentKind.INSTRUCTION, instruction))
    return PromptBundle(PromptKind.STANDARD, tuple(segments), cfg.suggestions_per_batch)


def _tail(text: str, limit: int) -> str:
    if len(text) <= limit:
        return text
    return TRUNCATION_MARKER + text[-limit:]


def build_debug_prompt(
    chat: list[ChatMessage], code_text: str, cfg: ConditionConfig, run: RunResult
) -> PromptBundle:
    """Assemble the error-focused prompt issued right after a failing run."""
    if not run.is_error:
        raise ContractError("debug prompts require an erroring run result")
    segments = list(history_segments(chat, cfg.history_limit))
    parts = [
        "The programmer just ran their code and it failed.",
        f"Current code:\n```\n{code_text}\n```",
        "Focus on the error output below and suggest how to diagnose and fix it.",
        f"Terminal error output:\n```\n{_tail(run.stderr, STDERR_TAIL_BYTES)}\n```",
    ]
    if run.stdout:
        parts.append(f"Program output before the failure:\n```\n{_tail(run.stdout, STDOUT_TAIL_BYTES)}\n```")
    parts.append(_format_directions(cfg.suggestions_per_batch, DEBUG_CATEGORIES))
    segments.append(PromptSegment(SegmentKind.INSTRUCTION, "\n\n".join(parts)))
    return PromptBundle(PromptKind.DEBUG, tuple(segments), cfg.suggestions_per_batch)


def build_chat_prompt(chat: list[ChatMessage], cfg: ConditionConfig) -> PromptBundle:
    """Plain chat turn: history only, no code context (the chat is code-blind)."""
    segments = [
        PromptSegment(
            SegmentKind.SYSTEM,
            "You are a helpful programming assistant chatting with a programmer. "
            "Answer their questions in natural language; include code snippets in "
            "fenced code blocks where useful.",
        )
    ]
    segments.extend(history_segments(chat, cfg.history_limit))
    return PromptBundle(PromptKind.CHAT, tuple(segments), 0)


def build_integration_prompt(code_text: str, suggestion_payload: dict) -> PromptBundle:
    """Ask the model to merge a suggestion into the current file (preview path)."""
    summary = suggestion_payload.get("summary", "")
    code = suggestion_payload.get("code") or ""
    bullets = suggestion_payload.get("explanation") or []
    parts = [
        "Integrate the suggestion below into the programmer's current code.",
        f"Current code:\n```\n{code_text}\n```",
        f"Suggestion: {summary}",
    ]
    if code:
        parts.append(f"Suggested snippet:\n```\n{code}\n```")
    if bullets:
        parts.append("Notes:\n" + "\n".join(f"- {b}" for b in bullets))
    parts.append(
        "Return the complete updated file in a single fenced code block. "
        "Keep unrelated code unchanged. Return nothing outside the code block."
    )
    segments = (PromptSegment(SegmentKind.INSTRUCTION, "\n\n".join(parts)),)
    return PromptBundle(PromptKind.CHAT, segments, 0)
