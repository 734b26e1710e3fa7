"""Model providers.

A provider turns a prompt bundle into raw text. Three implementations:

* ``HttpChatProvider`` posts to an OpenAI-style chat-completions endpoint.
* ``ScriptedProvider`` serves canned responses from memory or a fixture
  directory, in file order or keyed by prompt hash. Deterministic, used
  by tests and replay.
* ``EchoProvider`` fabricates a well-formed batch from the prompt alone,
  so the full stack can run offline.
"""

from __future__ import annotations

import hashlib
import json
import os
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Protocol

from .categories import CATEGORY_LABELS, DEBUG_CATEGORIES, SuggestionCategory
from .errors import ConfigurationError, ProviderError
from .prompts import PromptBundle, PromptKind, SegmentKind

PROVIDER_KEY_ENV = "PROACTIVE_PROVIDER_KEY"


@dataclass(frozen=True)
class ProviderResponse:
    raw_text: str
    latency_ms: int
    provider_name: str


class Provider(Protocol):
    name: str

    def complete(self, bundle: PromptBundle) -> ProviderResponse:
        """Run one completion. Raises ProviderError on failure."""
        ...


def prompt_digest(bundle: PromptBundle) -> str:
    """Stable 12-hex-digit key for a bundle, for keyed scripted fixtures."""
    return hashlib.sha256(bundle.text().encode("utf-8")).hexdigest()[:12]


def _load_fixture(path: Path) -> tuple[str, int]:
    raw = path.read_text(encoding="utf-8")
    if path.suffix == ".json":
        try:
            data = json.loads(raw)
        except json.JSONDecodeError as exc:
            raise ConfigurationError(f"bad scripted fixture {path.name}: {exc}") from exc
        if isinstance(data, dict) and "raw_text" in data:
            return str(data["raw_text"]), int(data.get("latency_ms", 0))
    return raw, 0


class ScriptedProvider:
    """Replays canned responses.

    Sequence mode consumes fixtures in sorted file order (or list order
    for in-memory responses). Keyed mode looks fixtures up by
    ``prompt_digest`` so the same prompt always gets the same response.
    """

    name = "scripted"

    def __init__(
        self,
        responses: list[tuple[str, int]] | None = None,
        fixture_dir: str | Path | None = None,
        keyed: bool = False,
    ) -> None:
        self._keyed = keyed
        self._cursor = 0
        self._responses: list[tuple[str, int]] = list(responses or [])
        self._by_key: dict[str, tuple[str, int]] = {}
        if fixture_dir is not None:
            root = Path(fixture_dir)
            if not root.is_dir():
                raise ConfigurationError(f"scripted fixture dir not found: {root}")
            for path in sorted(root.iterdir()):
                if not path.is_file():
                    continue
                fixture = _load_fixture(path)
                self._responses.append(fixture)
                self._by_key[path.stem] = fixture

    @classmethod
    def from_texts(cls, texts: list[str], latency_ms: int = 0) -> "ScriptedProvider":
        return cls(responses=[(text, latency_ms) for text in texts])

    def complete(self, bundle: PromptBundle) -> ProviderResponse:
        if self._keyed:
            key = prompt_digest(bundle)
            if key not in self._by_key:
                raise ProviderError(f"no scripted fixture for prompt key {key}")
            raw_text, latency_ms = self._by_key[key]
        else:
            if self._cursor >= len(self._responses):
                raise ProviderError("scripted provider exhausted")
            raw_text, latency_ms = self._responses[self._cursor]
            self._cursor += 1
        return ProviderResponse(raw_text=raw_text, latency_ms=latency_ms, provider_name=self.name)


class EchoProvider:
    """Offline provider that derives a valid batch from the prompt itself."""

    name = "echo"

    def __init__(self, latency_ms: int = 0) -> None:
        self._latency_ms = latency_ms

    def complete(self, bundle: PromptBundle) -> ProviderResponse:
        if bundle.kind is PromptKind.CHAT:
            tail = bundle.segments[-1].content if bundle.segments else ""
            return ProviderResponse(
                raw_text=f"You said: {tail[:200]}",
                latency_ms=self._latency_ms,
                provider_name=self.name,
            )
        digest = prompt_digest(bundle)
        if bundle.kind is PromptKind.DEBUG:
            categories: tuple[SuggestionCategory, ...] = DEBUG_CATEGORIES
        else:
            categories = tuple(SuggestionCategory)
        entries = []
        for i in range(bundle.max_suggestions or 1):
            category = categories[i % len(categories)]
            entries.append(
                {
                    "type": CATEGORY_LABELS[category],
                    "summary": f"canned idea {i + 1} for prompt {digest}",
                    "code": f"# suggestion {i + 1} ({digest})\n",
                    "explanation": [
                        f"Derived offline from prompt {digest}.",
                        "Replace the echo provider to get real model output.",
                    ],
                }
            )
        raw_text = "```json\n" + json.dumps(entries, indent=2) + "\n```"
        return ProviderResponse(
            raw_text=raw_text, latency_ms=self._latency_ms, provider_name=self.name
        )


class HttpChatProvider:
    """Chat-completions client over HTTP.

    Reads the API key from the PROACTIVE_PROVIDER_KEY environment
    variable. All transport or protocol problems surface as
    ProviderError; latency is wall-clock milliseconds for the call.
    """

    name = "http"

    def __init__(
        self,
        base_url: str,
        model: str,
        timeout_s: float = 30.0,
        api_key: str | None = None,
    ) -> None:
        self._base_url = base_url.rstrip("/")
        self._model = model
        self._timeout_s = timeout_s
        self._api_key = api_key

    def _messages(self, bundle: PromptBundle) -> list[dict[str, str]]:
        messages = []
        for segment in bundle.segments:
            if segment.kind is SegmentKind.SYSTEM:
                role = "system"
            elif segment.kind is SegmentKind.HISTORY:
                role = segment.chat_role or "user"
            else:
                role = "user"
            messages.append({"role": role, "content": segment.content})
        return messages

    def complete(self, bundle: PromptBundle) -> ProviderResponse:
        import httpx

        key = self._api_key or os.environ.get(PROVIDER_KEY_ENV)
        if not key:
            raise ProviderError(f"{PROVIDER_KEY_ENV} is not set")
        payload = {"model": self._model, "messages": self._messages(bundle)}
        started = time.monotonic()
        try:
            response = httpx.post(
                f"{self._base_url}/chat/completions",
                json=payload,
                headers={"Authorization": f"Bearer {key}"},
                timeout=self._timeout_s,
            )
            response.raise_for_status()
            body = response.json()
            raw_text = body["choices"][0]["message"]["content"]
        except ProviderError:
            raise
        except Exception as exc:
            raise ProviderError(f"provider call failed: {exc}") from exc
        if not isinstance(raw_text, str):
            raise ProviderError("provider returned a non-text completion")
        latency_ms = int((time.monotonic() - started) * 1000)
        return ProviderResponse(raw_text=raw_text, latency_ms=latency_ms, provider_name=self.name)


def provider_from_uri(uri: str) -> Provider:
    """Build a provider from a CLI-style descriptor.

    ``echo``, ``scripted:<dir>``, ``scripted-keyed:<dir>``, or
    ``http:<base_url>,<model>``.
    """
    if uri == "echo":
        return EchoProvider()
    scheme, _, rest = uri.partition(":")
    if scheme == "scripted" and rest:
        return ScriptedProvider(fixture_dir=rest)
    if scheme == "scripted-keyed" and rest:
        return ScriptedProvider(fixture_dir=rest, keyed=True)
    if scheme == "http" and rest:
        base_url, _, model = rest.rpartition(",")
        if not base_url or not model:
            raise ConfigurationError("http provider needs http:<base_url>,<model>")
        return HttpChatProvider(base_url=base_url, model=model)
    raise ConfigurationError(f"unknown provider descriptor: {uri!r}")
