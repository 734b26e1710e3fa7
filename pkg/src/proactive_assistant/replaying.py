"""Deterministic session driving and log replay.

``DeterministicDriver`` is the virtual-clock dispatcher: provider calls
and runs are executed at submit time, but their completions are held in
a queue and delivered when the clock reaches request time plus latency.
Clock ticks fire every second, anchored at session creation. At the same
instant, completions deliver before ticks, and both deliver before a
user action.

``replay_log`` rebuilds the input actions of a recorded session from its
telemetry log and drives them through a fresh runtime with the same
scripted provider. Derived events (generations, chat replies, previews)
are regenerated, not copied, so a successful replay demonstrates the
whole pipeline is deterministic: the new log is byte-identical to the
original up to the session id.

Byte-identity is guaranteed for logs recorded on this virtual clock
(tests, demos, and replay output itself). A log recorded against a live
wall clock can carry scheduler noise in its derived-event timestamps
(a completion lands a few ms after request + latency); replay places
those completions at exactly request + latency and reports the
difference as divergence.
"""

from __future__ import annotations

import heapq
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Callable

from .conditions import ConditionConfig
from .errors import ValidationError
from .providers import Provider
from .runner import RawRunOutput, ScriptedRunner
from .runtime import OnDone, SessionRuntime, Work
from .session import DEFAULT_ERROR_PATTERN
from .tasks import TaskRegistry
from .telemetry import TelemetryEvent, TelemetryWriter, read_log

TICK_INTERVAL_MS = 1000

_PRIORITY_COMPLETION = 0
_PRIORITY_TICK = 1


class DeterministicDriver:
    """Virtual-clock dispatcher for one session."""

    def __init__(self, start_ts_ms: int = 0, tick_interval_ms: int = TICK_INTERVAL_MS) -> None:
        self.now = start_ts_ms
        self.tick_interval_ms = tick_interval_ms
        self.runtime: SessionRuntime | None = None
        self._next_tick: int | None = None
        self._queue: list[tuple[int, int, int, Callable[[int], None]]] = []
        self._seq = 0

    def attach(self, runtime: SessionRuntime) -> None:
        self.runtime = runtime
        self._next_tick = runtime.session.created_at_ms + self.tick_interval_ms

    # Dispatcher protocol: run the work now, deliver the completion when
    # the clock reaches request + latency (exceptions deliver immediately).
    def submit(self, request_ts: int, work: Work, on_done: OnDone) -> None:
        try:
            value, latency_ms = work()
        except Exception as exc:  # delivered into the stream, not raised here
            value, latency_ms = exc, 0
        due = max(request_ts + latency_ms, self.now)
        self._seq += 1
        heapq.heappush(
            self._queue,
            (due, _PRIORITY_COMPLETION, self._seq, lambda ts: on_done(value, ts)),
        )

    def _due_completion(self) -> int | None:
        return self._queue[0][0] if self._queue else None

    def advance_to(self, ts_ms: int) -> None:
        """Deliver every completion and tick due at or before ``ts_ms``."""
        if ts_ms < self.now:
            raise ValidationError(f"clock cannot go backwards ({ts_ms} < {self.now})")
        while True:
            completion_due = self._due_completion()
            tick_due = self._next_tick
            next_due = None
            if completion_due is not None and completion_due <= ts_ms:
                next_due = completion_due
            use_tick = False
            if tick_due is not None and tick_due <= ts_ms:
                if next_due is None or tick_due < next_due:
                    next_due = tick_due
                    use_tick = True
            if next_due is None:
                break
            self.now = next_due
            if use_tick:
                assert self.runtime is not None and self._next_tick is not None
                self._next_tick += self.tick_interval_ms
                self.runtime.tick(next_due)
            else:
                _, _, _, deliver = heapq.heappop(self._queue)
                deliver(next_due)
        self.now = ts_ms

    def run_at(self, ts_ms: int, action: Callable[[], Any]) -> Any:
        """Advance the clock to ``ts_ms``, then perform a user action."""
        self.advance_to(ts_ms)
        return action()

    def drain(self, until_ts_ms: int) -> None:
        self.advance_to(until_ts_ms)


@dataclass(frozen=True)
class _ReplayAction:
    ts_ms: int
    log_index: int
    run: Callable[[SessionRuntime], Any]


@dataclass
class ReplayResult:
    session_id: str
    log_path: Path
    actions_replayed: int
    events_in: int


def _derive_actions(events: list[TelemetryEvent]) -> list[_ReplayAction]:
    """Turn logged events back into the user actions that caused them.

    Derived events (generated batches, chat replies, preview payloads,
    discards) are skipped; the pipeline regenerates them. Asynchronous
    user actions are scheduled at their original request time, recovered
    from the completion timestamp minus the recorded latency.
    """
    actions: list[_ReplayAction] = []

    def add(ts: int, index: int, run: Callable[[SessionRuntime], Any]) -> None:
        actions.append(_ReplayAction(ts, index, run))

    pending_preview_text: str | None = None
    for index, event in enumerate(events):
        kind, payload, ts = event.kind, event.payload, event.ts_ms
        if kind == "code_update":
            if payload.get("source") == "user":
                doc_id, text = payload["doc_id"], payload["text"]
                add(ts, index, lambda rt, d=doc_id, t=text, at=ts: rt.apply_edit(d, t, at))
            else:
                pending_preview_text = payload.get("text")
        elif kind == "chat_send":
            content = payload["message"]["content"]
            add(ts, index, lambda rt, c=content, at=ts: rt.post_chat(c, at))
        elif kind == "suggestion_expand":
            add(ts, index, _sugg(SessionRuntime.expand_suggestion, payload["suggestion_id"], ts))
        elif kind == "suggestion_collapse":
            add(ts, index, _sugg(SessionRuntime.collapse_suggestion, payload["suggestion_id"], ts))
        elif kind == "suggestion_accept":
            add(ts, index, _sugg(SessionRuntime.accept_suggestion, payload["suggestion_id"], ts))
        elif kind == "suggestion_delete":
            add(ts, index, _sugg(SessionRuntime.delete_suggestion, payload["suggestion_id"], ts))
        elif kind == "suggestion_copy":
            add(ts, index, _sugg(SessionRuntime.copy_suggestion, payload["suggestion_id"], ts))
        elif kind == "suggestions_clear":
            add(ts, index, lambda rt, at=ts: rt.clear_all(at))
        elif kind == "suggestion_request":
            add(ts, index, lambda rt, at=ts: rt.manual_request(at))
        elif kind == "run":
            request_ts = ts - int(payload.get("duration_ms", 0))
            doc_id = payload["doc_id"]
            add(request_ts, index, lambda rt, d=doc_id, at=request_ts: rt.run_code(d, at))
        elif kind == "suggestion_preview":
            request_ts = ts - int(payload.get("latency_ms", 0))
            sid = payload["suggestion_id"]
            add(request_ts, index, lambda rt, s=sid, at=request_ts: rt.request_preview(s, at))
        elif kind == "provider_error" and payload.get("context") == "preview":
            request_ts = ts - int(payload.get("latency_ms", 0))
            sid = payload["suggestion_id"]
            add(request_ts, index, lambda rt, s=sid, at=request_ts: rt.request_preview(s, at))
        elif kind == "preview_accept":
            pid = payload["preview_id"]
            selected = payload.get("selected")
            final_text = pending_preview_text if payload.get("final_text_override") else None
            pending_preview_text = None
            add(
                ts,
                index,
                lambda rt, p=pid, sel=selected, ft=final_text, at=ts: rt.accept_preview(
                    p, at, selected_hunks=sel, final_text=ft
                ),
            )
        elif kind == "preview_hide":
            pid = payload["preview_id"]
            add(ts, index, lambda rt, p=pid, at=ts: rt.hide_preview(p, at))
        elif kind == "task_submit":
            add(ts, index, lambda rt, at=ts: rt.submit_task(at))
        # Everything else is derived and regenerates during replay.
    actions.sort(key=lambda a: (a.ts_ms, a.log_index))
    return actions


def _sugg(method, suggestion_id: str, ts: int) -> Callable[[SessionRuntime], Any]:
    return lambda rt, m=method, s=suggestion_id, at=ts: m(rt, s, at)


def _scripted_runner(events: list[TelemetryEvent]) -> ScriptedRunner:
    outputs = []
    for event in events:
        if event.kind == "run":
            p = event.payload
            outputs.append(
                RawRunOutput(
                    stdout=p["stdout"],
                    stderr=p["stderr"],
                    exit_status=int(p["exit_status"]),
                    duration_ms=int(p.get("duration_ms", 0)),
                )
            )
    return ScriptedRunner(outputs)


def replay_log(
    log_path: str | Path,
    provider: Provider,
    out_dir: str | Path,
    session_id: str | None = None,
    task_registry: TaskRegistry | None = None,
) -> ReplayResult:
    """Re-drive a recorded session; returns where the new log was written."""
    _, events, skipped = read_log(log_path)
    if skipped:
        raise ValidationError(f"{log_path}: {skipped} malformed lines, refusing to replay")
    if not events or events[0].kind != "session_created":
        raise ValidationError(f"{log_path}: log does not start with session_created")
    created = events[0]
    condition = ConditionConfig.from_payload(created.payload["condition"])
    task = None
    task_payload = created.payload.get("task")
    if task_payload:
        registry = task_registry or TaskRegistry()
        task = registry.get(task_payload["task_id"])
    writer = TelemetryWriter(out_dir)
    driver = DeterministicDriver(start_ts_ms=created.ts_ms)
    runtime = SessionRuntime.create(
        condition,
        provider=provider,
        telemetry=writer,
        dispatcher=driver,
        ts_ms=created.ts_ms,
        runner=_scripted_runner(events),
        task=task,
        session_id=session_id,
        participant_id=created.payload.get("participant_id"),
        error_pattern=created.payload.get("error_pattern", DEFAULT_ERROR_PATTERN),
    )
    driver.attach(runtime)
    actions = _derive_actions(events)
    for action in actions:
        driver.run_at(action.ts_ms, lambda a=action: a.run(runtime))
    driver.drain(events[-1].ts_ms)
    writer.close()
    return ReplayResult(
        session_id=runtime.session.session_id,
        log_path=writer.path_for(runtime.session.session_id),
        actions_replayed=len(actions),
        events_in=len(events),
    )


def normalized_log_text(path: str | Path, placeholder: str = "SESSION") -> str:
    """Log file text with the session id replaced, for byte comparison.

    Only the session_id field itself is masked; an id that happens to
    occur as a substring elsewhere (code, instructions) is left alone.
    """
    text = Path(path).read_text(encoding="utf-8")
    match = re.search(r'"session_id":"([^"]+)"', text)
    if not match:
        return text
    return text.replace(
        f'"session_id":"{match.group(1)}"', f'"session_id":"{placeholder}"'
    )


def logs_equivalent(path_a: str | Path, path_b: str | Path) -> bool:
    """True when two logs are byte-identical modulo session_id."""
    return normalized_log_text(path_a) == normalized_log_text(path_b)
