"""Provider implementations: scripted, echo, HTTP, and the URI factory."""

import json

import httpx
import pytest

from proactive_assistant.categories import DEBUG_CATEGORIES, SuggestionCategory
from proactive_assistant.conditions import SUGGEST
from proactive_assistant.errors import ConfigurationError, ProviderError
from proactive_assistant.parsing import parse_suggestions
from proactive_assistant.prompts import (
    build_chat_prompt,
    build_debug_prompt,
    build_standard_prompt,
)
from proactive_assistant.providers import (
    PROVIDER_KEY_ENV,
    EchoProvider,
    HttpChatProvider,
    ScriptedProvider,
    prompt_digest,
    provider_from_uri,
)
from proactive_assistant.session import ChatMessage, ChatRole, RunResult

CODE = "x = 1"


def standard_bundle(code=CODE):
    return build_standard_prompt([], code, SUGGEST)


def chat_bundle(text="hello there"):
    return build_chat_prompt([ChatMessage(ChatRole.USER, text)], SUGGEST)


def test_scripted_sequence_order_and_exhaustion():
    provider = ScriptedProvider.from_texts(["first", "second"], latency_ms=7)
    bundle = standard_bundle()
    assert provider.complete(bundle).raw_text == "first"
    response = provider.complete(bundle)
    assert response.raw_text == "second"
    assert response.latency_ms == 7
    assert response.provider_name == "scripted"
    with pytest.raises(ProviderError):
        provider.complete(bundle)


def test_scripted_fixture_dir_sorted_order(tmp_path):
    (tmp_path / "02_reply.txt").write_text("second response", encoding="utf-8")
    (tmp_path / "01_reply.json").write_text(
        json.dumps({"raw_text": "first response", "latency_ms": 250}), encoding="utf-8"
    )
    (tmp_path / "subdir").mkdir()
    provider = ScriptedProvider(fixture_dir=tmp_path)
    first = provider.complete(standard_bundle())
    assert (first.raw_text, first.latency_ms) == ("first response", 250)
    assert provider.complete(standard_bundle()).raw_text == "second response"


def test_scripted_keyed_lookup(tmp_path):
    bundle = standard_bundle()
    key = prompt_digest(bundle)
    (tmp_path / f"{key}.txt").write_text("keyed response", encoding="utf-8")
    provider = ScriptedProvider(fixture_dir=tmp_path, keyed=True)
    assert provider.complete(bundle).raw_text == "keyed response"
    other = standard_bundle(code="totally different code")
    with pytest.raises(ProviderError):
        provider.complete(other)


def test_scripted_rejects_missing_dir_and_bad_json(tmp_path):
    with pytest.raises(ConfigurationError):
        ScriptedProvider(fixture_dir=tmp_path / "nope")
    (tmp_path / "bad.json").write_text("{broken", encoding="utf-8")
    with pytest.raises(ConfigurationError):
        ScriptedProvider(fixture_dir=tmp_path)


def test_echo_chat_reflects_the_last_segment():
    response = EchoProvider().complete(chat_bundle("what does len do?"))
    assert response.raw_text == "You said: what does len do?"
    assert response.provider_name == "echo"


def test_echo_standard_batch_is_parseable_and_full():
    bundle = standard_bundle()
    response = EchoProvider(latency_ms=42).complete(bundle)
    assert response.latency_ms == 42
    outcome = parse_suggestions(response.raw_text, bundle.max_suggestions)
    assert outcome.ok and outcome.warnings == 0
    assert len(outcome.suggestions) == SUGGEST.suggestions_per_batch
    cycle = tuple(SuggestionCategory)
    for i, suggestion in enumerate(outcome.suggestions):
        assert suggestion.category is cycle[i % len(cycle)]


def test_echo_debug_batch_uses_debug_categories_only():
    run = RunResult(stdout="", stderr="ZeroDivisionError", exit_status=1, is_error=True)
    bundle = build_debug_prompt([], CODE, SUGGEST, run)
    outcome = parse_suggestions(EchoProvider().complete(bundle).raw_text, bundle.max_suggestions)
    assert outcome.ok
    assert all(s.category in DEBUG_CATEGORIES for s in outcome.suggestions)


def test_echo_is_deterministic_per_prompt():
    bundle = standard_bundle()
    assert EchoProvider().complete(bundle).raw_text == EchoProvider().complete(bundle).raw_text
    other = standard_bundle(code="y = 2")
    assert EchoProvider().complete(other).raw_text != EchoProvider().complete(bundle).raw_text


class _FakeResponse:
    def __init__(self, body, status=200):
        self._body = body
        self._status = status

    def raise_for_status(self):
        if self._status >= 400:
            raise httpx.HTTPStatusError("boom", request=None, response=None)

    def json(self):
        return self._body


def test_http_provider_posts_chat_messages(monkeypatch):
    seen = {}

    def fake_post(url, json=None, headers=None, timeout=None):
        seen.update(url=url, payload=json, headers=headers, timeout=timeout)
        return _FakeResponse({"choices": [{"message": {"content": "model says hi"}}]})

    monkeypatch.setattr(httpx, "post", fake_post)
    monkeypatch.setenv(PROVIDER_KEY_ENV, "sekrit")
    provider = HttpChatProvider(base_url="https://api.example.test/v1/", model="gpt-test")
    response = provider.complete(standard_bundle())

    assert response.raw_text == "model says hi"
    assert response.provider_name == "http"
    assert isinstance(response.latency_ms, int)
    assert seen["url"] == "https://api.example.test/v1/chat/completions"
    assert seen["headers"]["Authorization"] == "Bearer sekrit"
    assert seen["payload"]["model"] == "gpt-test"
    roles = [m["role"] for m in seen["payload"]["messages"]]
    assert roles[0] == "system"
    assert roles[-1] == "user"


def test_http_provider_requires_a_key(monkeypatch):
    monkeypatch.delenv(PROVIDER_KEY_ENV, raising=False)
    provider = HttpChatProvider(base_url="https://api.example.test", model="m")
    with pytest.raises(ProviderError):
        provider.complete(standard_bundle())


def test_http_provider_wraps_transport_and_protocol_failures(monkeypatch):
    monkeypatch.setenv(PROVIDER_KEY_ENV, "k")
    provider = HttpChatProvider(base_url="https://api.example.test", model="m")

    monkeypatch.setattr(httpx, "post", lambda *a, **k: _FakeResponse({}, status=500))
    with pytest.raises(ProviderError):
        provider.complete(standard_bundle())

    monkeypatch.setattr(
        httpx, "post", lambda *a, **k: _FakeResponse({"choices": [{"message": {"content": 7}}]})
    )
    with pytest.raises(ProviderError):
        provider.complete(standard_bundle())

    def explode(*a, **k):
        raise httpx.ConnectError("no route")

    monkeypatch.setattr(httpx, "post", explode)
    with pytest.raises(ProviderError):
        provider.complete(standard_bundle())


def test_provider_from_uri(tmp_path):
    assert isinstance(provider_from_uri("echo"), EchoProvider)
    provider = provider_from_uri(f"scripted:{tmp_path}")
    assert isinstance(provider, ScriptedProvider)
    provider = provider_from_uri(f"scripted-keyed:{tmp_path}")
    assert isinstance(provider, ScriptedProvider)
    provider = provider_from_uri("http:https://api.example.test,gpt-test")
    assert isinstance(provider, HttpChatProvider)
    for bad in ["", "nope", "scripted:", "http:only-a-url"]:
        with pytest.raises(ConfigurationError):
            provider_from_uri(bad)
