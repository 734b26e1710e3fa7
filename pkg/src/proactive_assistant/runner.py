"""Code runners.

The Run button hands the current document to an external command. The
command template gets the code via a temp file ({file} placeholder),
runs under a wall-clock limit, and both output streams are capped.
Sandboxing is the operator's concern; the default template just invokes
an interpreter.
"""

from __future__ import annotations

import shlex
import subprocess
import tempfile
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Protocol

from .errors import RunnerUnavailableError

DEFAULT_TIMEOUT_S = 10.0
OUTPUT_CAP_BYTES = 64 * 1024
TIMEOUT_MARKER = "[runner] wall-clock limit exceeded"
TRUNCATION_MARKER = "\n[runner] output truncated"


@dataclass(frozen=True)
class RawRunOutput:
    stdout: str
    stderr: str
    exit_status: int
    duration_ms: int


class Runner(Protocol):
    def run(self, code_text: str) -> RawRunOutput:
        """Execute one snapshot of the document. Raises RunnerUnavailableError
        if running is not possible at all."""
        ...


def _cap(text: str) -> str:
    data = text.encode("utf-8", errors="replace")
    if len(data) <= OUTPUT_CAP_BYTES:
        return text
    clipped = data[:OUTPUT_CAP_BYTES].decode("utf-8", errors="replace")
    return clipped + TRUNCATION_MARKER


class CommandRunner:
    """Runs code through an external command template.

    ``command`` is a shell-less template such as ``python3 {file}``; the
    placeholder is replaced with a temp file holding the code.
    """

    def __init__(
        self,
        command: str | list[str] = "python3 {file}",
        timeout_s: float = DEFAULT_TIMEOUT_S,
        suffix: str = ".py",
    ) -> None:
        self._argv_template = shlex.split(command) if isinstance(command, str) else list(command)
        if not any("{file}" in part for part in self._argv_template):
            raise RunnerUnavailableError("runner command template lacks a {file} placeholder")
        self._timeout_s = timeout_s
        self._suffix = suffix

    def run(self, code_text: str) -> RawRunOutput:
        started = time.monotonic()
        with tempfile.TemporaryDirectory(prefix="assistant-run-") as workdir:
            path = Path(workdir) / f"snippet{self._suffix}"
            path.write_text(code_text, encoding="utf-8")
            argv = [part.replace("{file}", str(path)) for part in self._argv_template]
            try:
                proc = subprocess.run(
                    argv,
                    capture_output=True,
                    text=True,
                    timeout=self._timeout_s,
                    cwd=workdir,
                )
                stdout, stderr, exit_status = proc.stdout, proc.stderr, proc.returncode
            except subprocess.TimeoutExpired as exc:
                stdout = _decode(exc.stdout)
                stderr = _decode(exc.stderr)
                if stderr and not stderr.endswith("\n"):
                    stderr += "\n"
                stderr += TIMEOUT_MARKER
                exit_status = 124
            except FileNotFoundError as exc:
                raise RunnerUnavailableError(f"runner command not found: {exc}") from exc
        duration_ms = int((time.monotonic() - started) * 1000)
        return RawRunOutput(
            stdout=_cap(stdout),
            stderr=_cap(stderr),
            exit_status=exit_status,
            duration_ms=duration_ms,
        )


def _decode(data) -> str:
    if data is None:
        return ""
    if isinstance(data, bytes):
        return data.decode("utf-8", errors="replace")
    return data


class ScriptedRunner:
    """Returns queued results in order; deterministic, for tests and replay."""

    def __init__(self, outputs: list[RawRunOutput] | None = None) -> None:
        self._outputs = list(outputs or [])
        self._cursor = 0

    @classmethod
    def from_payloads(cls, payloads: list[dict]) -> "ScriptedRunner":
        outputs = [
            RawRunOutput(
                stdout=p.get("stdout", ""),
                stderr=p.get("stderr", ""),
                exit_status=int(p.get("exit_status", 0)),
                duration_ms=int(p.get("duration_ms", 0)),
            )
            for p in payloads
        ]
        return cls(outputs)

    def push(self, output: RawRunOutput) -> None:
        self._outputs.append(output)

    def run(self, code_text: str) -> RawRunOutput:
        if self._cursor >= len(self._outputs):
            raise RunnerUnavailableError("scripted runner exhausted")
        output = self._outputs[self._cursor]
        self._cursor += 1
        return output


class NullRunner:
    """Placeholder when no runner is configured; /run maps this to 503."""

    def run(self, code_text: str) -> RawRunOutput:
        raise RunnerUnavailableError("runner not configured")
