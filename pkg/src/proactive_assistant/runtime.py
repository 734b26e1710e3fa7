"""Session runtime.

``SessionRuntime`` owns one session's state and applies every operation
in a single ordered event stream: user requests come in through the
gateway (or a test driver), provider calls and code runs happen off to
the side, and their completions re-enter the stream tagged with the
generation token they were started under. Each operation takes an
explicit ``ts_ms`` so the clock can be virtual.

Every user-visible state change logs exactly one telemetry event before
the operation returns. If the log cannot be written the session goes
read-only and refuses further mutations.
"""

from __future__ import annotations

import uuid
from dataclasses import dataclass
from functools import partial
from typing import Any, Callable, Protocol

from .conditions import ConditionConfig
from .errors import (
    BadStateError,
    NotFoundError,
    ProviderError,
    RunnerUnavailableError,
    SessionReadOnlyError,
    TelemetryWriteError,
    UnsupportedInConditionError,
    ValidationError,
)
from .parsing import parse_suggestions
from .preview import PreviewResult, build_preview
from .prompts import (
    build_chat_prompt,
    build_debug_prompt,
    build_integration_prompt,
    build_standard_prompt,
)
from .providers import Provider, ProviderResponse
from .runner import RawRunOutput, Runner
from .session import (
    DEFAULT_ERROR_PATTERN,
    ChatMessage,
    ChatRole,
    CodeDocument,
    Session,
    Suggestion,
    SuggestionOrigin,
    SuggestionState,
    TERMINAL_STATES,
    extract_code_blocks,
    make_run_result,
)
from .tasks import TaskFixture
from .telemetry import TelemetryWriter
from .timing import (
    Action,
    ActivityEvent,
    Decision,
    EventKind,
    GenerationKind,
    TimingState,
    initial_state,
    on_event,
)

# Work units return (value, latency_ms); the dispatcher decides when the
# completion callback runs and with what timestamp.
Work = Callable[[], tuple[Any, int]]
OnDone = Callable[[Any, int], None]


class Dispatcher(Protocol):
    def submit(self, request_ts: int, work: Work, on_done: OnDone) -> None:
        """Run ``work`` off the session stream; deliver its result (or the
        exception it raised) back into the stream via ``on_done``."""
        ...


@dataclass(frozen=True)
class PushFrame:
    frame_kind: str  # suggestions_batch | chat_message | preview_ready | run_output | notice
    seq: int
    payload: dict

    def to_payload(self) -> dict:
        return {"frame_kind": self.frame_kind, "seq": self.seq, "payload": self.payload}


_ORIGIN_TO_KIND = {
    SuggestionOrigin.PROACTIVE_STANDARD: GenerationKind.STANDARD,
    SuggestionOrigin.MANUAL_REQUEST: GenerationKind.STANDARD,
    SuggestionOrigin.PROACTIVE_DEBUG: GenerationKind.DEBUG,
}


class SessionRuntime:
    """All mutations to one session, in arrival order.

    Not itself thread-safe: the caller (gateway serial executor or test
    driver) must ensure operations and completion callbacks never
    overlap.
    """

    def __init__(
        self,
        session: Session,
        provider: Provider,
        telemetry: TelemetryWriter,
        dispatcher: Dispatcher,
        runner: Runner | None = None,
        error_pattern: str = DEFAULT_ERROR_PATTERN,
        participant_id: str | None = None,
        task: TaskFixture | None = None,
    ) -> None:
        self.session = session
        self.provider = provider
        self.runner = runner
        self.telemetry = telemetry
        self.dispatcher = dispatcher
        self.error_pattern = error_pattern
        self.participant_id = participant_id
        self.task = task
        self.read_only = False
        self.timing_state: TimingState = initial_state(session.created_at_ms)
        self._counters: dict[str, int] = {}
        self._previews: dict[str, PreviewResult] = {}
        self._pending_chats = 0
        self._task_open = False
        self._push_seq = 0
        self._push_sinks: list[Callable[[PushFrame], None]] = []

    # ---------------------------------------------------------------- setup

    @classmethod
    def create(
        cls,
        condition: ConditionConfig,
        *,
        provider: Provider,
        telemetry: TelemetryWriter,
        dispatcher: Dispatcher,
        ts_ms: int,
        runner: Runner | None = None,
        task: TaskFixture | None = None,
        session_id: str | None = None,
        participant_id: str | None = None,
        error_pattern: str = DEFAULT_ERROR_PATTERN,
    ) -> "SessionRuntime":
        session = Session(
            session_id=session_id or uuid.uuid4().hex[:12],
            condition=condition,
            created_at_ms=ts_ms,
            task_id=task.task_id if task else None,
        )
        runtime = cls(
            session,
            provider=provider,
            telemetry=telemetry,
            dispatcher=dispatcher,
            runner=runner,
            error_pattern=error_pattern,
            participant_id=participant_id,
            task=task,
        )
        doc = CodeDocument(doc_id="d1", text=task.starter_code if task else "", version=1)
        session.documents.append(doc)
        runtime._log(
            "session_created",
            {
                "condition": condition.to_payload(),
                "participant_id": participant_id,
                "task": task.to_payload() if task else None,
                "document": {"doc_id": doc.doc_id, "text": doc.text, "version": doc.version},
                "error_pattern": error_pattern,
            },
            ts_ms,
        )
        if task is not None:
            runtime._log("task_start", {"task_id": task.task_id, "name": task.name}, ts_ms)
            runtime._task_open = True
        return runtime

    # ------------------------------------------------------------- plumbing

    @property
    def cfg(self) -> ConditionConfig:
        return self.session.condition

    def _next_id(self, prefix: str) -> str:
        value = self._counters.get(prefix, 0) + 1
        self._counters[prefix] = value
        return f"{prefix}{value}"

    def _check_writable(self) -> None:
        if self.read_only:
            raise SessionReadOnlyError(
                f"session {self.session.session_id} is read-only after a telemetry failure"
            )

    def _log(self, kind: str, payload: dict, ts_ms: int) -> None:
        try:
            self.telemetry.log(
                session_id=self.session.session_id,
                condition_name=self.cfg.name,
                task_id=self.session.task_id,
                ts_ms=ts_ms,
                kind=kind,
                payload=payload,
            )
        except TelemetryWriteError:
            self.read_only = True
            raise

    def _feed(self, kind: EventKind, ts_ms: int, **kw) -> Decision:
        self.timing_state, decision = on_event(
            self.timing_state, self.cfg, ActivityEvent(kind, ts_ms, **kw)
        )
        return decision

    @property
    def push_seq(self) -> int:
        return self._push_seq

    def add_push_sink(self, sink: Callable[[PushFrame], None]) -> None:
        self._push_sinks.append(sink)

    def remove_push_sink(self, sink: Callable[[PushFrame], None]) -> None:
        if sink in self._push_sinks:
            self._push_sinks.remove(sink)

    def _push(self, frame_kind: str, payload: dict) -> None:
        self._push_seq += 1
        frame = PushFrame(frame_kind=frame_kind, seq=self._push_seq, payload=payload)
        for sink in list(self._push_sinks):
            sink(frame)

    def _document(self, doc_id: str) -> CodeDocument:
        doc = self.session.document(doc_id)
        if doc is None:
            raise NotFoundError(f"unknown document {doc_id!r}")
        return doc

    def _suggestion(self, suggestion_id: str) -> Suggestion:
        found = self.session.find_suggestion(suggestion_id)
        if found is None:
            raise NotFoundError(f"unknown suggestion {suggestion_id!r}")
        return found

    def primary_document(self) -> CodeDocument:
        return self.session.documents[0]

    def snapshot(self) -> dict:
        session = self.session
        return {
            "session_id": session.session_id,
            "condition": self.cfg.to_payload(),
            "push_seq": self.push_seq,
            "read_only": self.read_only,
            "task": self.task.to_payload() if self.task else None,
            "documents": [
                {"doc_id": d.doc_id, "text": d.text, "version": d.version}
                for d in session.documents
            ],
            "chat": [m.to_payload() for m in session.chat],
            "suggestions": [s.to_payload() for s in session.live_suggestions()],
            "previews": [p.to_payload() for p in self._previews.values()],
            "last_run": session.last_run.to_payload() if session.last_run else None,
        }

    # ------------------------------------------------------------ edits

    def apply_edit(self, doc_id: str, new_text: str, ts_ms: int, source: str = "user") -> int:
        """Replace a document's text; returns the new version."""
        self._check_writable()
        if not isinstance(new_text, str):
            raise ValidationError("edit text must be a string")
        doc = self._document(doc_id)
        doc.text = new_text
        doc.version += 1
        self._log(
            "code_update",
            {"doc_id": doc.doc_id, "version": doc.version, "text": new_text, "source": source},
            ts_ms,
        )
        if source == "user":
            self._feed(EventKind.USER_TYPING, ts_ms)
        return doc.version

    # ------------------------------------------------------------ chat

    def post_chat(self, content: str, ts_ms: int) -> None:
        self._check_writable()
        if not content or not content.strip():
            raise ValidationError("chat message must be non-empty")
        message = ChatMessage(ChatRole.USER, content, extract_code_blocks(content), ts_ms)
        self.session.chat.append(message)
        self._log("chat_send", {"message": message.to_payload()}, ts_ms)
        self._feed(EventKind.CHAT_SEND, ts_ms)
        self._pending_chats += 1
        bundle = build_chat_prompt(self.session.chat, self.cfg)
        self.dispatcher.submit(ts_ms, partial(self._provider_work, bundle), self._on_chat_done)

    def _provider_work(self, bundle) -> tuple[ProviderResponse, int]:
        response = self.provider.complete(bundle)
        return response, response.latency_ms

    def _on_chat_done(self, result: Any, ts_ms: int) -> None:
        if self.read_only:
            return
        self._pending_chats -= 1
        if isinstance(result, Exception):
            message = ChatMessage(
                ChatRole.ASSISTANT, "The assistant could not respond (provider error).", [], ts_ms
            )
            self.session.chat.append(message)
            self._log(
                "provider_error",
                {"context": "chat", "message": str(result), "reply": message.to_payload()},
                ts_ms,
            )
        else:
            response: ProviderResponse = result
            message = ChatMessage(
                ChatRole.ASSISTANT,
                response.raw_text,
                extract_code_blocks(response.raw_text),
                ts_ms,
            )
            self.session.chat.append(message)
            self._log(
                "chat_response",
                {
                    "message": message.to_payload(),
                    "latency_ms": response.latency_ms,
                    "provider_name": response.provider_name,
                },
                ts_ms,
            )
        self._push("chat_message", {"message": message.to_payload()})
        if self._pending_chats == 0:
            self._feed(EventKind.CHAT_RESPONSE_ARRIVED, ts_ms)

    # ------------------------------------------------- suggestion lifecycle

    def expand_suggestion(self, suggestion_id: str, ts_ms: int) -> None:
        self._check_writable()
        suggestion = self._suggestion(suggestion_id)
        if suggestion.state is SuggestionState.EXPANDED:
            return  # idempotent, not logged twice
        suggestion.transition(SuggestionState.EXPANDED)
        self._log("suggestion_expand", self._ref_payload(suggestion), ts_ms)
        self._feed(EventKind.SUGGESTION_INTERACTION, ts_ms)

    def collapse_suggestion(self, suggestion_id: str, ts_ms: int) -> None:
        self._check_writable()
        suggestion = self._suggestion(suggestion_id)
        if suggestion.state is SuggestionState.COLLAPSED:
            return
        suggestion.transition(SuggestionState.COLLAPSED)
        # Collapsing is tidying, not engagement: no cooldown reset.
        self._log("suggestion_collapse", self._ref_payload(suggestion), ts_ms)

    def accept_suggestion(self, suggestion_id: str, ts_ms: int) -> None:
        self._check_writable()
        suggestion = self._suggestion(suggestion_id)
        suggestion.transition(SuggestionState.ACCEPTED)
        message = ChatMessage(
            ChatRole.ACCEPTED_SUGGESTION,
            _accepted_message_text(suggestion),
            [suggestion.code] if suggestion.code else [],
            ts_ms,
            suggestion_id=suggestion.suggestion_id,
        )
        self.session.chat.append(message)
        payload = self._ref_payload(suggestion)
        payload["message"] = message.to_payload()
        self._log("suggestion_accept", payload, ts_ms)
        self._feed(EventKind.SUGGESTION_INTERACTION, ts_ms)
        self._push("chat_message", {"message": message.to_payload()})

    def delete_suggestion(self, suggestion_id: str, ts_ms: int) -> None:
        self._check_writable()
        suggestion = self._suggestion(suggestion_id)
        suggestion.transition(SuggestionState.DELETED)
        self._log("suggestion_delete", self._ref_payload(suggestion), ts_ms)
        self._feed(EventKind.SUGGESTION_INTERACTION, ts_ms)

    def copy_suggestion(self, suggestion_id: str, ts_ms: int) -> None:
        """Frontend-reported clipboard copy; telemetry plus cooldown reset."""
        self._check_writable()
        suggestion = self._suggestion(suggestion_id)
        self._log(
            "suggestion_copy",
            {"suggestion_id": suggestion.suggestion_id, "category": suggestion.category.value},
            ts_ms,
        )
        self._feed(EventKind.SUGGESTION_INTERACTION, ts_ms)

    def clear_all(self, ts_ms: int) -> None:
        """Atomically clear the chat history and every live suggestion."""
        self._check_writable()
        cleared = []
        for suggestion in self.session.suggestions:
            if suggestion.state not in TERMINAL_STATES:
                suggestion.state = SuggestionState.DELETED
                cleared.append(suggestion.suggestion_id)
        chat_cleared = len(self.session.chat)
        self.session.chat.clear()
        self._log(
            "suggestions_clear",
            {"suggestion_ids": cleared, "chat_messages_cleared": chat_cleared},
            ts_ms,
        )
        self._feed(EventKind.SUGGESTION_INTERACTION, ts_ms)

    def _ref_payload(self, suggestion: Suggestion) -> dict:
        return {
            "suggestion_id": suggestion.suggestion_id,
            "category": suggestion.category.value,
            "batch_id": suggestion.batch_id,
            "origin": suggestion.origin.value,
        }

    # ------------------------------------------------------------ generation

    def manual_request(self, ts_ms: int) -> int:
        """Explicit request for suggestions; returns the generation token."""
        self._check_writable()
        decision = self._feed(EventKind.MANUAL_REQUEST, ts_ms)  # raises in baseline
        self._log("suggestion_request", {"token": decision.token}, ts_ms)
        self._start_generation(decision, ts_ms, SuggestionOrigin.MANUAL_REQUEST)
        return decision.token or 0

    def tick(self, ts_ms: int) -> None:
        """Clock tick; may start a standard generation."""
        if self.read_only:
            return
        decision = self._feed(EventKind.CLOCK_TICK, ts_ms)
        if decision.action is Action.START_GENERATION:
            self._start_generation(decision, ts_ms, SuggestionOrigin.PROACTIVE_STANDARD)

    def _start_generation(self, decision: Decision, ts_ms: int, origin: SuggestionOrigin) -> None:
        assert decision.action is Action.START_GENERATION and decision.token is not None
        document = self.primary_document()
        if decision.kind is GenerationKind.DEBUG:
            assert self.session.last_run is not None
            bundle = build_debug_prompt(
                self.session.chat, document.text, self.cfg, self.session.last_run
            )
        else:
            bundle = build_standard_prompt(self.session.chat, document.text, self.cfg)
        self.dispatcher.submit(
            ts_ms,
            partial(self._provider_work, bundle),
            partial(self._on_generation_done, decision.token, decision.kind, origin),
        )

    def _on_generation_done(
        self,
        token: int,
        kind: GenerationKind,
        origin: SuggestionOrigin,
        result: Any,
        ts_ms: int,
    ) -> None:
        if self.read_only:
            return
        decision = self._feed(EventKind.GENERATION_COMPLETED, ts_ms, token=token)
        if isinstance(result, Exception):
            self._log(
                "provider_error",
                {
                    "context": "generation",
                    "kind": kind.value,
                    "token": token,
                    "message": str(result),
                },
                ts_ms,
            )
            return
        response: ProviderResponse = result
        if decision.action is not Action.DISPLAY_BATCH:
            self._log(
                "generation_discarded",
                {"token": token, "kind": kind.value, "reason": "stale"},
                ts_ms,
            )
            return
        outcome = parse_suggestions(response.raw_text, self.cfg.suggestions_per_batch)
        if not outcome.ok:
            self._log(
                "parse_failure",
                {
                    "token": token,
                    "kind": kind.value,
                    "provider_name": response.provider_name,
                    "latency_ms": response.latency_ms,
                    "raw_text": response.raw_text,
                    "warnings": outcome.warnings,
                },
                ts_ms,
            )
            return
        self._display_batch(outcome, response, token, kind, origin, ts_ms)

    def _display_batch(
        self,
        outcome,
        response: ProviderResponse,
        token: int,
        kind: GenerationKind,
        origin: SuggestionOrigin,
        ts_ms: int,
    ) -> None:
        # The new batch replaces anything still on screen; replaced cards
        # are dropped silently (no delete telemetry, they were never acted on).
        for old in self.session.suggestions:
            if old.state not in TERMINAL_STATES:
                old.state = SuggestionState.DELETED
        batch_id = self._next_id("b")
        fresh: list[Suggestion] = []
        for draft in outcome.suggestions:
            fresh.append(
                Suggestion(
                    suggestion_id=self._next_id("s"),
                    category=draft.category,
                    summary=draft.summary,
                    code=draft.code,
                    explanation=list(draft.explanation),
                    origin=origin,
                    batch_id=batch_id,
                )
            )
        self.session.suggestions.extend(fresh)
        payloads = [s.to_payload() for s in fresh]
        self._log(
            "suggestions_generated",
            {
                "batch_id": batch_id,
                "kind": kind.value,
                "origin": origin.value,
                "token": token,
                "provider_name": response.provider_name,
                "latency_ms": response.latency_ms,
                "raw_text": response.raw_text,
                "parse_warnings": outcome.warnings,
                "suggestions": payloads,
            },
            ts_ms,
        )
        self._log(
            "suggestion_shown",
            {"batch_id": batch_id, "suggestion_ids": [s.suggestion_id for s in fresh]},
            ts_ms,
        )
        self._push("suggestions_batch", {"batch_id": batch_id, "suggestions": payloads})

    # ------------------------------------------------------------ previews

    def request_preview(self, suggestion_id: str, ts_ms: int) -> str:
        """Start the integration call; returns the preview id."""
        self._check_writable()
        if not self.cfg.preview_enabled:
            raise UnsupportedInConditionError("preview is not available in this condition")
        suggestion = self._suggestion(suggestion_id)
        if suggestion.state is SuggestionState.DELETED:
            raise BadStateError("cannot preview a deleted suggestion")
        preview_id = self._next_id("p")
        self._feed(EventKind.SUGGESTION_INTERACTION, ts_ms)
        bundle = build_integration_prompt(self.primary_document().text, suggestion.to_payload())
        self.dispatcher.submit(
            ts_ms,
            partial(self._provider_work, bundle),
            partial(
                self._on_preview_done, preview_id, suggestion_id, self.primary_document().text
            ),
        )
        return preview_id

    def _on_preview_done(
        self, preview_id: str, suggestion_id: str, original_text: str, result: Any, ts_ms: int
    ) -> None:
        if self.read_only:
            return
        latency_ms: int | None = None
        if not isinstance(result, Exception):
            response: ProviderResponse = result
            latency_ms = response.latency_ms
            try:
                preview = build_preview(
                    preview_id, suggestion_id, original_text, response.raw_text,
                    response.latency_ms,
                )
            except ProviderError as exc:
                result = exc
        if isinstance(result, Exception):
            payload = {
                "context": "preview",
                "preview_id": preview_id,
                "suggestion_id": suggestion_id,
                "message": str(result),
            }
            # Present when a response arrived but was unusable; replay uses
            # it to re-derive the request time.
            if latency_ms is not None:
                payload["latency_ms"] = latency_ms
            self._log("provider_error", payload, ts_ms)
            self._push(
                "notice",
                {"notice": "preview_failed", "suggestion_id": suggestion_id,
                 "message": str(result)},
            )
            return
        self._previews[preview_id] = preview
        self._log(
            "suggestion_preview",
            {
                "preview_id": preview_id,
                "suggestion_id": suggestion_id,
                "provider_name": response.provider_name,
                "latency_ms": response.latency_ms,
                "raw_text": response.raw_text,
                "hunk_count": len(preview.hunks),
                "no_changes": preview.is_noop,
            },
            ts_ms,
        )
        self._push("preview_ready", preview.to_payload())

    def accept_preview(
        self,
        preview_id: str,
        ts_ms: int,
        selected_hunks: list[int] | None = None,
        final_text: str | None = None,
    ) -> int:
        """Merge the previewed change into the document; returns the version."""
        self._check_writable()
        preview = self._previews.get(preview_id)
        if preview is None:
            raise NotFoundError(f"unknown preview {preview_id!r}")
        document = self.primary_document()
        merged = preview.merged_text(document.text, selected_hunks, final_text)
        version = self.apply_edit(document.doc_id, merged, ts_ms, source="preview")
        applied = len(preview.hunks) if selected_hunks is None else len(selected_hunks)
        self._log(
            "preview_accept",
            {
                "preview_id": preview_id,
                "suggestion_id": preview.suggestion_id,
                "hunk_count": applied,
                "selected": selected_hunks,
                "final_text_override": final_text is not None,
                "version": version,
            },
            ts_ms,
        )
        del self._previews[preview_id]
        # The merge is both a code change (invalidates in-flight batches,
        # leaves debugging mode) and a suggestion interaction (cooldown).
        self._feed(EventKind.USER_TYPING, ts_ms)
        self._feed(EventKind.SUGGESTION_INTERACTION, ts_ms)
        return version

    def hide_preview(self, preview_id: str, ts_ms: int) -> None:
        self._check_writable()
        preview = self._previews.pop(preview_id, None)
        if preview is None:
            raise NotFoundError(f"unknown preview {preview_id!r}")
        self._log(
            "preview_hide",
            {"preview_id": preview_id, "suggestion_id": preview.suggestion_id},
            ts_ms,
        )
        self._feed(EventKind.SUGGESTION_INTERACTION, ts_ms)

    def get_preview(self, preview_id: str) -> PreviewResult | None:
        return self._previews.get(preview_id)

    # ------------------------------------------------------------ running

    def run_code(self, doc_id: str, ts_ms: int) -> None:
        self._check_writable()
        if self.runner is None:
            raise RunnerUnavailableError("runner not configured")
        document = self._document(doc_id)
        self.dispatcher.submit(
            ts_ms,
            partial(self._run_work, document.text),
            partial(self._on_run_done, doc_id),
        )

    def _run_work(self, code_text: str) -> tuple[RawRunOutput, int]:
        assert self.runner is not None
        output = self.runner.run(code_text)
        return output, output.duration_ms

    def _on_run_done(self, doc_id: str, result: Any, ts_ms: int) -> None:
        if self.read_only:
            return
        if isinstance(result, Exception):
            self._log("provider_error", {"context": "runner", "message": str(result)}, ts_ms)
            self._push("notice", {"notice": "run_failed", "message": str(result)})
            return
        output: RawRunOutput = result
        run = make_run_result(output.stdout, output.stderr, output.exit_status, self.error_pattern)
        self.session.last_run = run
        payload = run.to_payload()
        payload.update({"doc_id": doc_id, "duration_ms": output.duration_ms})
        self._log("run", payload, ts_ms)
        self._push("run_output", {"doc_id": doc_id, "run": run.to_payload()})
        decision = self._feed(EventKind.RUN_COMPLETED, ts_ms, is_error=run.is_error)
        if decision.action is Action.START_GENERATION:
            self._start_generation(decision, ts_ms, SuggestionOrigin.PROACTIVE_DEBUG)

    # ------------------------------------------------------------ tasks

    def submit_task(self, ts_ms: int) -> None:
        self._check_writable()
        if not self._task_open or self.session.task_id is None:
            raise BadStateError("no open task to submit")
        self._log("task_submit", {"task_id": self.session.task_id}, ts_ms)
        self._task_open = False


def _accepted_message_text(suggestion: Suggestion) -> str:
    parts = [suggestion.summary]
    for bullet in suggestion.explanation:
        parts.append(f"- {bullet}")
    if suggestion.code:
        parts.append(f"```\n{suggestion.code}\n```")
    return "\n".join(parts)
