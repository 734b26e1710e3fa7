"""Append-only telemetry.

Every user-visible state change in a session produces exactly one event,
written as one JSON line. Files start with a schema-version header line.
Events carry a per-session gapless ``seq`` and non-decreasing ``ts_ms``,
which makes logs diff-able and replayable; provider output is retained
verbatim so a log is a complete record of the session's inputs.
"""

from __future__ import annotations

import json
import threading
from dataclasses import dataclass
from pathlib import Path

from .errors import TelemetryWriteError, ValidationError

SCHEMA_VERSION = 1

EVENT_KINDS = frozenset(
    {
        "session_created",
        "code_update",
        "chat_send",
        "chat_response",
        "suggestions_generated",
        "suggestion_shown",
        "suggestion_expand",
        "suggestion_collapse",
        "suggestion_accept",
        "suggestion_delete",
        "suggestions_clear",
        "suggestion_copy",
        "suggestion_request",
        "suggestion_preview",
        "preview_accept",
        "preview_hide",
        "generation_discarded",
        "parse_failure",
        "provider_error",
        "run",
        "task_start",
        "task_submit",
    }
)

# Events that a suggestion id must have been introduced before.
_SUGGESTION_REF_KINDS = frozenset(
    {
        "suggestion_expand",
        "suggestion_collapse",
        "suggestion_accept",
        "suggestion_delete",
        "suggestion_copy",
    }
)


@dataclass(frozen=True)
class TelemetryEvent:
    session_id: str
    condition_name: str
    task_id: str | None
    seq: int
    ts_ms: int
    kind: str
    payload: dict

    def to_line(self) -> str:
        record = {
            "session_id": self.session_id,
            "condition_name": self.condition_name,
            "task_id": self.task_id,
            "seq": self.seq,
            "ts_ms": self.ts_ms,
            "kind": self.kind,
            "payload": self.payload,
        }
        return json.dumps(record, sort_keys=True, separators=(",", ":"), ensure_ascii=False)

    @classmethod
    def from_record(cls, record: dict) -> "TelemetryEvent":
        return cls(
            session_id=record["session_id"],
            condition_name=record["condition_name"],
            task_id=record.get("task_id"),
            seq=int(record["seq"]),
            ts_ms=int(record["ts_ms"]),
            kind=record["kind"],
            payload=record.get("payload") or {},
        )


def header_line() -> str:
    return json.dumps({"schema_version": SCHEMA_VERSION}, sort_keys=True, separators=(",", ":"))


class TelemetryWriter:
    """One JSONL file per session under ``root`` (or one shared file).

    Writes are serialized by a lock and flushed before returning, so the
    log is the durable record of everything the operation did. Disk
    trouble surfaces as TelemetryWriteError; the owning session is
    expected to go read-only.
    """

    def __init__(self, root: str | Path, shared: bool = False) -> None:
        self._root = Path(root)
        self._shared = shared
        self._lock = threading.Lock()
        self._handles: dict[str, object] = {}
        self._next_seq: dict[str, int] = {}
        self._root.mkdir(parents=True, exist_ok=True)

    def path_for(self, session_id: str) -> Path:
        if self._shared:
            return self._root / "telemetry.jsonl"
        return self._root / f"{session_id}.jsonl"

    def _handle(self, session_id: str):
        key = "shared" if self._shared else session_id
        handle = self._handles.get(key)
        if handle is None:
            path = self.path_for(session_id)
            fresh = not path.exists()
            handle = path.open("a", encoding="utf-8")
            if fresh or path.stat().st_size == 0:
                handle.write(header_line() + "\n")
                handle.flush()
            self._handles[key] = handle
        return handle

    def log(
        self,
        session_id: str,
        condition_name: str,
        task_id: str | None,
        ts_ms: int,
        kind: str,
        payload: dict,
    ) -> TelemetryEvent:
        if kind not in EVENT_KINDS:
            raise ValidationError(f"unknown telemetry kind: {kind!r}")
        with self._lock:
            seq = self._next_seq.get(session_id, 1)
            event = TelemetryEvent(
                session_id=session_id,
                condition_name=condition_name,
                task_id=task_id,
                seq=seq,
                ts_ms=ts_ms,
                kind=kind,
                payload=payload,
            )
            try:
                handle = self._handle(session_id)
                handle.write(event.to_line() + "\n")
                handle.flush()
            except OSError as exc:
                raise TelemetryWriteError(f"telemetry write failed: {exc}") from exc
            self._next_seq[session_id] = seq + 1
            return event

    def close(self) -> None:
        with self._lock:
            for handle in self._handles.values():
                try:
                    handle.close()
                except OSError:
                    pass
            self._handles.clear()


def read_log(path: str | Path) -> tuple[int | None, list[TelemetryEvent], int]:
    """Parse one log file.

    Returns (schema_version, events, skipped_line_count). Malformed
    lines are skipped, not fatal.
    """
    schema_version: int | None = None
    events: list[TelemetryEvent] = []
    skipped = 0
    with Path(path).open("r", encoding="utf-8") as handle:
        for line_no, line in enumerate(handle, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError:
                skipped += 1
                continue
            if line_no == 1 and isinstance(record, dict) and "schema_version" in record:
                schema_version = int(record["schema_version"])
                continue
            try:
                events.append(TelemetryEvent.from_record(record))
            except (KeyError, TypeError, ValueError):
                skipped += 1
    return schema_version, events, skipped


def read_events(paths: list[str | Path]) -> tuple[list[TelemetryEvent], int]:
    events: list[TelemetryEvent] = []
    skipped = 0
    for path in paths:
        _, file_events, file_skipped = read_log(path)
        events.extend(file_events)
        skipped += file_skipped
    return events, skipped


def audit_events(events: list[TelemetryEvent]) -> list[str]:
    """Structural completeness audit. Returns problems; empty means pass."""
    problems: list[str] = []
    last_seq: dict[str, int] = {}
    last_ts: dict[str, int] = {}
    known_suggestions: dict[str, set[str]] = {}
    known_previews: dict[str, set[str]] = {}
    open_chats: dict[str, int] = {}
    doc_versions: dict[tuple[str, str], int] = {}
    open_task: dict[str, str | None] = {}

    for event in events:
        sid = event.session_id
        where = f"{sid} seq {event.seq}"
        if event.kind not in EVENT_KINDS:
            problems.append(f"{where}: unknown kind {event.kind!r}")
            continue
        expected = last_seq.get(sid, 0) + 1
        if event.seq != expected:
            problems.append(f"{where}: seq gap (expected {expected})")
        last_seq[sid] = event.seq
        if event.ts_ms < last_ts.get(sid, event.ts_ms):
            problems.append(f"{where}: ts_ms decreased")
        last_ts[sid] = event.ts_ms
        if expected == 1 and event.kind != "session_created":
            problems.append(f"{where}: first event is {event.kind}, not session_created")

        payload = event.payload
        if event.kind == "code_update":
            if not isinstance(payload.get("text"), str):
                problems.append(f"{where}: code_update without full text snapshot")
            doc_key = (sid, payload.get("doc_id", ""))
            version = payload.get("version", 0)
            if version <= doc_versions.get(doc_key, 0):
                problems.append(f"{where}: document version did not increase")
            doc_versions[doc_key] = version
        elif event.kind == "suggestions_generated":
            ids = {s.get("suggestion_id") for s in payload.get("suggestions", [])}
            known_suggestions.setdefault(sid, set()).update(ids)
        elif event.kind in _SUGGESTION_REF_KINDS:
            if payload.get("suggestion_id") not in known_suggestions.get(sid, set()):
                problems.append(f"{where}: {event.kind} references unknown suggestion")
        elif event.kind == "suggestion_preview":
            known_previews.setdefault(sid, set()).add(payload.get("preview_id"))
        elif event.kind in ("preview_accept", "preview_hide"):
            if payload.get("preview_id") not in known_previews.get(sid, set()):
                problems.append(f"{where}: {event.kind} references unknown preview")
        elif event.kind == "chat_send":
            open_chats[sid] = open_chats.get(sid, 0) + 1
        elif event.kind == "chat_response":
            if open_chats.get(sid, 0) < 1:
                problems.append(f"{where}: chat_response without a pending chat_send")
            else:
                open_chats[sid] -= 1
        elif event.kind == "task_start":
            open_task[sid] = payload.get("task_id")
        elif event.kind == "task_submit":
            if open_task.get(sid) != payload.get("task_id"):
                problems.append(f"{where}: task_submit without matching task_start")
            open_task[sid] = None
    return problems


def audit_log(paths: list[str | Path]) -> list[str]:
    problems: list[str] = []
    all_events: list[TelemetryEvent] = []
    for path in paths:
        schema_version, events, skipped = read_log(path)
        if schema_version != SCHEMA_VERSION:
            problems.append(f"{path}: missing or wrong schema_version header")
        if skipped:
            problems.append(f"{path}: {skipped} malformed lines")
        all_events.extend(events)
    problems.extend(audit_events(all_events))
    return problems
