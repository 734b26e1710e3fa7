"""HTTP gateway: sessions over REST plus a server-sent-events push channel.

Each session's mutations run on its own serial executor thread, so
handlers never race each other or the provider/runner completion
callbacks. Provider and runner calls run on a shared pool and re-enter
the session stream via the dispatcher; HTTP handling never blocks on
their latency. Frames carry a per-session seq for client-side dedup; a
reconnecting stream gets no history, just a notice frame with the
current snapshot.
"""

from __future__ import annotations

import json
import queue
import threading
import time
import uuid
from concurrent.futures import Future, ThreadPoolExecutor
from contextlib import asynccontextmanager
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable

from fastapi import FastAPI, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse, PlainTextResponse, Response, StreamingResponse

from .conditions import ConditionRegistry, load_condition_file
from .errors import (
    AssistantError,
    BadStateError,
    ConfigurationError,
    NotFoundError,
    ProviderError,
    RunnerUnavailableError,
    SessionReadOnlyError,
    StalePreviewError,
    TelemetryWriteError,
    UnsupportedInConditionError,
    ValidationError,
)
from .providers import Provider, provider_from_uri
from .runner import CommandRunner, Runner
from .runtime import PushFrame, SessionRuntime
from .tasks import TaskRegistry
from .telemetry import TelemetryWriter

# Subclasses before their bases: first match wins.
_ERROR_MAP: tuple[tuple[type, str, int], ...] = (
    (NotFoundError, "not_found", 404),
    (StalePreviewError, "stale_preview", 409),
    (UnsupportedInConditionError, "unsupported_in_condition", 409),
    (SessionReadOnlyError, "bad_state", 409),
    (TelemetryWriteError, "bad_state", 409),
    (BadStateError, "bad_state", 409),
    (ProviderError, "provider_unavailable", 503),
    (RunnerUnavailableError, "runner_unavailable", 503),
    (ValidationError, "validation", 400),
    (ConfigurationError, "validation", 400),
)

STREAM_KEEPALIVE_S = 15.0


def map_error(exc: AssistantError) -> tuple[str, int]:
    for etype, code, status in _ERROR_MAP:
        if isinstance(exc, etype):
            return code, status
    return "bad_state", 409


def now_ms() -> int:
    return time.time_ns() // 1_000_000


@dataclass
class ServerConfig:
    """Operator settings; see load_server_config for the file format."""

    provider_uri: str = "echo"
    telemetry_dir: str = "telemetry"
    runner_command: str | None = None  # e.g. "python3 {file}"; None disables /run
    runner_timeout_s: float = 10.0
    condition_file: str | None = None
    tick_interval_s: float = 0.25
    host: str = "127.0.0.1"
    port: int = 8000
    # Direct injection for tests and embedding; overrides the URI/command.
    provider: Provider | None = None
    runner: Runner | None = None

    def build_provider(self) -> Provider:
        return self.provider if self.provider is not None else provider_from_uri(self.provider_uri)

    def build_runner(self) -> Runner | None:
        if self.runner is not None:
            return self.runner
        if self.runner_command:
            return CommandRunner(self.runner_command, timeout_s=self.runner_timeout_s)
        return None


def load_server_config(path: str | Path) -> ServerConfig:
    """Read a JSON config file; unknown keys are rejected."""
    raw = Path(path).read_text(encoding="utf-8")
    try:
        data = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise ConfigurationError(f"config file {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigurationError(f"config file {path}: expected an object")
    allowed = {
        "provider_uri", "telemetry_dir", "runner_command", "runner_timeout_s",
        "condition_file", "tick_interval_s", "host", "port",
    }
    unknown = set(data) - allowed
    if unknown:
        raise ConfigurationError(f"config file {path}: unknown keys {sorted(unknown)}")
    return ServerConfig(**data)


class SerialExecutor:
    """FIFO executor backed by one daemon thread."""

    def __init__(self, name: str) -> None:
        self._queue: queue.Queue = queue.Queue()
        self._thread = threading.Thread(target=self._loop, name=name, daemon=True)
        self._thread.start()

    def _loop(self) -> None:
        while True:
            item = self._queue.get()
            if item is None:
                return
            fn, future = item
            if future.set_running_or_notify_cancel():
                try:
                    future.set_result(fn())
                except BaseException as exc:  # delivered via Future.result()
                    future.set_exception(exc)

    def submit(self, fn: Callable[[], Any]) -> Future:
        future: Future = Future()
        self._queue.put((fn, future))
        return future

    def call(self, fn: Callable[[], Any]) -> Any:
        return self.submit(fn).result()

    def close(self) -> None:
        self._queue.put(None)


class ThreadDispatcher:
    """Runs work on a shared pool, completions on the session executor."""

    def __init__(self, executor: SerialExecutor, pool: ThreadPoolExecutor) -> None:
        self._executor = executor
        self._pool = pool

    def submit(self, request_ts: int, work, on_done) -> None:
        def job() -> None:
            try:
                value, _latency = work()
                outcome: Any = value
            except Exception as exc:
                outcome = exc
            done_ts = now_ms()
            self._executor.submit(lambda: on_done(outcome, done_ts))

        self._pool.submit(job)


@dataclass
class SessionHandle:
    runtime: SessionRuntime
    executor: SerialExecutor
    subscribers: list = field(default_factory=list)

    def call(self, fn: Callable[[], Any]) -> Any:
        return self.executor.call(fn)

    def fan_out(self, frame: PushFrame) -> None:
        # Runs on the executor thread, like subscribe/unsubscribe below.
        for subscriber in list(self.subscribers):
            subscriber.put(frame)

    def subscribe(self) -> tuple[queue.Queue, PushFrame]:
        def attach():
            subscriber: queue.Queue = queue.Queue()
            self.subscribers.append(subscriber)
            notice = PushFrame(
                "notice",
                self.runtime.push_seq,
                {"notice": "connected", "snapshot": self.runtime.snapshot()},
            )
            return subscriber, notice

        return self.call(attach)

    def unsubscribe(self, subscriber: queue.Queue) -> None:
        def detach():
            if subscriber in self.subscribers:
                self.subscribers.remove(subscriber)

        self.executor.submit(detach)


class Gateway:
    """Owns sessions, their executors, and the shared worker pool."""

    def __init__(self, config: ServerConfig | None = None) -> None:
        self.config = config or ServerConfig()
        extra = load_condition_file(self.config.condition_file) if self.config.condition_file else ()
        self.conditions = ConditionRegistry(extra)
        self.tasks = TaskRegistry()
        self.telemetry = TelemetryWriter(self.config.telemetry_dir)
        self.provider = self.config.build_provider()
        self.runner = self.config.build_runner()
        self.pool = ThreadPoolExecutor(max_workers=16, thread_name_prefix="assistant-work")
        self.sessions: dict[str, SessionHandle] = {}
        self._lock = threading.Lock()
        self._closed = threading.Event()
        self._ticker = threading.Thread(target=self._tick_loop, daemon=True)
        self._ticker.start()

    def _tick_loop(self) -> None:
        while not self._closed.wait(self.config.tick_interval_s):
            with self._lock:
                handles = list(self.sessions.values())
            for handle in handles:
                handle.executor.submit(lambda h=handle: h.runtime.tick(now_ms()))

    def create_session(
        self,
        condition_name: str,
        task_id: str | None = None,
        participant_id: str | None = None,
    ) -> SessionHandle:
        condition = self.conditions.get(condition_name)
        task = self.tasks.get(task_id) if task_id else None
        session_id = uuid.uuid4().hex[:12]
        executor = SerialExecutor(name=f"session-{session_id}")
        dispatcher = ThreadDispatcher(executor, self.pool)

        def build() -> SessionRuntime:
            return SessionRuntime.create(
                condition,
                provider=self.provider,
                telemetry=self.telemetry,
                dispatcher=dispatcher,
                ts_ms=now_ms(),
                runner=self.runner,
                task=task,
                session_id=session_id,
                participant_id=participant_id,
            )

        runtime = executor.call(build)
        handle = SessionHandle(runtime=runtime, executor=executor)
        runtime.add_push_sink(handle.fan_out)
        with self._lock:
            self.sessions[session_id] = handle
        return handle

    def handle(self, session_id: str) -> SessionHandle:
        with self._lock:
            handle = self.sessions.get(session_id)
        if handle is None:
            raise NotFoundError(f"unknown session {session_id!r}")
        return handle

    def close(self) -> None:
        self._closed.set()
        with self._lock:
            handles = list(self.sessions.values())
            self.sessions.clear()
        for handle in handles:
            handle.executor.close()
        self.pool.shutdown(wait=False)
        self.telemetry.close()


def _sse_line(frame: PushFrame) -> str:
    return f"data: {json.dumps(frame.to_payload(), ensure_ascii=False)}\n\n"


async def _read_body(request: Request) -> dict:
    raw = await request.body()
    if not raw:
        return {}
    try:
        data = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"request body is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise ValidationError("request body must be a JSON object")
    return data


def _require(body: dict, key: str) -> Any:
    if key not in body:
        raise ValidationError(f"missing required field {key!r}")
    return body[key]


def create_app(config: ServerConfig | None = None, gateway: Gateway | None = None) -> FastAPI:
    gateway = gateway or Gateway(config)

    @asynccontextmanager
    async def lifespan(_app: FastAPI):
        yield
        gateway.close()

    app = FastAPI(title="proactive-assistant", docs_url=None, redoc_url=None, lifespan=lifespan)
    app.state.gateway = gateway
    # The web client may be served from a different origin than the
    # gateway (e.g. a static file server during development).
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )

    @app.exception_handler(AssistantError)
    async def _assistant_error(_request: Request, exc: AssistantError) -> JSONResponse:
        code, status = map_error(exc)
        return JSONResponse(
            status_code=status,
            content={"error": {"code": code, "message": str(exc)}},
        )

    @app.post("/sessions", status_code=201)
    async def create_session(request: Request) -> dict:
        body = await _read_body(request)
        condition_name = _require(body, "condition")
        handle = gateway.create_session(
            condition_name,
            task_id=body.get("task"),
            participant_id=body.get("participant_id"),
        )
        return handle.call(handle.runtime.snapshot)

    @app.get("/sessions/{session_id}")
    def get_session(session_id: str) -> dict:
        handle = gateway.handle(session_id)
        return handle.call(handle.runtime.snapshot)

    @app.post("/sessions/{session_id}/edits", status_code=204)
    async def post_edit(session_id: str, request: Request) -> Response:
        body = await _read_body(request)
        doc_id = _require(body, "doc_id")
        text = _require(body, "text")
        handle = gateway.handle(session_id)
        handle.call(lambda: handle.runtime.apply_edit(doc_id, text, now_ms()))
        return Response(status_code=204)

    @app.post("/sessions/{session_id}/chat", status_code=202)
    async def post_chat(session_id: str, request: Request) -> dict:
        body = await _read_body(request)
        content = _require(body, "content")
        handle = gateway.handle(session_id)
        handle.call(lambda: handle.runtime.post_chat(content, now_ms()))
        return {"accepted": True}

    @app.post("/sessions/{session_id}/suggestions/request", status_code=202)
    def manual_request(session_id: str) -> dict:
        handle = gateway.handle(session_id)
        token = handle.call(lambda: handle.runtime.manual_request(now_ms()))
        return {"accepted": True, "token": token}

    @app.post("/sessions/{session_id}/suggestions/clear", status_code=204)
    def clear_suggestions(session_id: str) -> Response:
        handle = gateway.handle(session_id)
        handle.call(lambda: handle.runtime.clear_all(now_ms()))
        return Response(status_code=204)

    _SUGGESTION_OPS = {
        "expand": SessionRuntime.expand_suggestion,
        "collapse": SessionRuntime.collapse_suggestion,
        "accept": SessionRuntime.accept_suggestion,
        "delete": SessionRuntime.delete_suggestion,
        "copy": SessionRuntime.copy_suggestion,
    }

    @app.post("/sessions/{session_id}/suggestions/{suggestion_id}/{op}", status_code=204)
    def suggestion_op(session_id: str, suggestion_id: str, op: str) -> Response:
        handle = gateway.handle(session_id)
        if op == "preview":
            preview_id = handle.call(
                lambda: handle.runtime.request_preview(suggestion_id, now_ms())
            )
            return JSONResponse(status_code=202, content={"accepted": True, "preview_id": preview_id})
        method = _SUGGESTION_OPS.get(op)
        if method is None:
            raise NotFoundError(f"unknown suggestion operation {op!r}")
        handle.call(lambda: method(handle.runtime, suggestion_id, now_ms()))
        return Response(status_code=204)

    @app.post("/sessions/{session_id}/previews/{preview_id}/accept", status_code=204)
    async def accept_preview(session_id: str, preview_id: str, request: Request) -> Response:
        body = await _read_body(request)
        selected = body.get("selected_hunks")
        final_text = body.get("final_text")
        if selected is not None and (
            not isinstance(selected, list) or not all(isinstance(i, int) for i in selected)
        ):
            raise ValidationError("selected_hunks must be a list of hunk indexes")
        if final_text is not None and not isinstance(final_text, str):
            raise ValidationError("final_text must be a string")
        handle = gateway.handle(session_id)
        handle.call(
            lambda: handle.runtime.accept_preview(
                preview_id, now_ms(), selected_hunks=selected, final_text=final_text
            )
        )
        return Response(status_code=204)

    @app.post("/sessions/{session_id}/previews/{preview_id}/hide", status_code=204)
    def hide_preview(session_id: str, preview_id: str) -> Response:
        handle = gateway.handle(session_id)
        handle.call(lambda: handle.runtime.hide_preview(preview_id, now_ms()))
        return Response(status_code=204)

    @app.post("/sessions/{session_id}/run", status_code=202)
    async def run_code(session_id: str, request: Request) -> dict:
        body = await _read_body(request)
        doc_id = _require(body, "doc_id")
        handle = gateway.handle(session_id)
        handle.call(lambda: handle.runtime.run_code(doc_id, now_ms()))
        return {"accepted": True}

    @app.post("/sessions/{session_id}/task/submit", status_code=204)
    def submit_task(session_id: str) -> Response:
        handle = gateway.handle(session_id)
        handle.call(lambda: handle.runtime.submit_task(now_ms()))
        return Response(status_code=204)

    @app.get("/sessions/{session_id}/telemetry")
    def download_telemetry(session_id: str) -> PlainTextResponse:
        gateway.handle(session_id)  # 404 for unknown sessions
        path = gateway.telemetry.path_for(session_id)
        text = path.read_text(encoding="utf-8") if path.exists() else ""
        return PlainTextResponse(text, media_type="application/x-ndjson")

    @app.get("/sessions/{session_id}/stream")
    def stream(session_id: str) -> StreamingResponse:
        handle = gateway.handle(session_id)
        subscriber, notice = handle.subscribe()

        def frames():
            try:
                yield _sse_line(notice)
                while True:
                    try:
                        frame = subscriber.get(timeout=STREAM_KEEPALIVE_S)
                    except queue.Empty:
                        yield ": keepalive\n\n"
                        continue
                    yield _sse_line(frame)
            finally:
                handle.unsubscribe(subscriber)

        return StreamingResponse(frames(), media_type="text/event-stream")

    return app
