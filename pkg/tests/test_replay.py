"""Replay determinism: re-driving a log reproduces it byte for byte.

Each test records an original session through the deterministic driver,
replays its log with a fresh provider, and requires the new log to be
identical modulo session id.
"""

import json

import pytest

from proactive_assistant.conditions import BASELINE, PERSISTENT_SUGGEST, SUGGEST, SUGGEST_PREVIEW
from proactive_assistant.errors import ValidationError
from proactive_assistant.providers import EchoProvider, ScriptedProvider
from proactive_assistant.replaying import (
    DeterministicDriver,
    logs_equivalent,
    normalized_log_text,
    replay_log,
)
from proactive_assistant.runner import RawRunOutput, ScriptedRunner
from proactive_assistant.runtime import SessionRuntime
from proactive_assistant.tasks import TaskRegistry
from proactive_assistant.telemetry import TelemetryWriter, read_log

from test_runtime import batch_text, integration_text


def record_session(
    tmp_path,
    condition,
    provider,
    actions,
    runner=None,
    task=None,
    participant_id=None,
):
    """Drive one original session; returns its log path."""
    out_dir = tmp_path / "original"
    writer = TelemetryWriter(out_dir)
    driver = DeterministicDriver(start_ts_ms=0)
    runtime = SessionRuntime.create(
        condition,
        provider=provider,
        telemetry=writer,
        dispatcher=driver,
        ts_ms=0,
        runner=runner,
        task=task,
        session_id="original",
        participant_id=participant_id,
    )
    driver.attach(runtime)
    actions(driver, runtime)
    writer.close()
    return out_dir / "original.jsonl"


def replay_and_compare(tmp_path, log_path, provider):
    result = replay_log(log_path, provider, tmp_path / "replayed", session_id="replayed")
    assert result.session_id == "replayed"
    assert logs_equivalent(log_path, result.log_path), (
        "replayed log differs from original"
    )
    _, original_events, _ = read_log(log_path)
    assert result.events_in == len(original_events)
    return result


ERROR_RUN = RawRunOutput(stdout="", stderr="ValueError: boom", exit_status=1, duration_ms=400)


def rich_responses(doc_text):
    return [
        (batch_text(3), 300),
        (integration_text(doc_text + "\npass"), 100),
        ("Use sorted() with a key function.", 250),
        (batch_text(2, "manual"), 300),
        (batch_text(2, "debug"), 300),
    ]


def drive_rich_session(driver, runtime):
    """Edits, a standard batch, a partial preview accept, chat, a manual
    batch, an erroring run with a debug batch, tray churn, submit."""
    doc = "x = 1\ny = 2\nz = 3"
    driver.run_at(500, lambda: runtime.apply_edit("d1", doc, 500))
    driver.advance_to(6500)  # standard batch triggers at 6000, displays 6300
    driver.run_at(7000, lambda: runtime.expand_suggestion("s1", 7000))
    driver.run_at(7500, lambda: runtime.request_preview("s1", 7500))
    driver.advance_to(7700)  # preview ready at 7600
    driver.run_at(8000, lambda: runtime.accept_preview("p1", 8000, selected_hunks=[0]))
    driver.run_at(9000, lambda: runtime.post_chat("How do I sort a list?", 9000))
    driver.run_at(10000, lambda: runtime.manual_request(10000))
    driver.advance_to(10500)  # manual batch displays at 10300
    driver.run_at(11000, lambda: runtime.run_code("d1", 11000))
    driver.advance_to(11800)  # run at 11400, debug batch displays 11700
    driver.run_at(12500, lambda: runtime.expand_suggestion("s6", 12500))
    driver.run_at(12600, lambda: runtime.collapse_suggestion("s6", 12600))
    driver.run_at(12700, lambda: runtime.expand_suggestion("s6", 12700))
    driver.run_at(12800, lambda: runtime.accept_suggestion("s6", 12800))
    driver.run_at(13000, lambda: runtime.copy_suggestion("s7", 13000))
    driver.run_at(13500, lambda: runtime.clear_all(13500))
    driver.run_at(14000, lambda: runtime.submit_task(14000))
    driver.drain(15000)


def test_rich_preview_session_replays_byte_identical(tmp_path):
    doc = "x = 1\ny = 2\nz = 3"
    task = TaskRegistry().get("storefront")
    log_path = record_session(
        tmp_path,
        SUGGEST_PREVIEW,
        ScriptedProvider(responses=rich_responses(doc)),
        drive_rich_session,
        runner=ScriptedRunner([ERROR_RUN]),
        task=task,
        participant_id="p7",
    )
    result = replay_and_compare(
        tmp_path, log_path, ScriptedProvider(responses=rich_responses(doc))
    )
    # One action per user-caused event: edit, expand, preview request,
    # preview accept, chat, manual request, run, three tray toggles,
    # accept, copy, clear, submit.
    assert result.actions_replayed == 14


def test_final_text_override_survives_replay(tmp_path):
    responses = [
        (batch_text(1), 300),
        (integration_text("a\nX\nc"), 100),
    ]

    def actions(driver, runtime):
        driver.run_at(100, lambda: runtime.apply_edit("d1", "a\nb\nc", 100))
        driver.run_at(200, lambda: runtime.manual_request(200))
        driver.advance_to(600)  # batch displays at 500
        driver.run_at(700, lambda: runtime.expand_suggestion("s1", 700))
        driver.run_at(800, lambda: runtime.request_preview("s1", 800))
        driver.advance_to(950)  # ready at 900
        driver.run_at(
            1000,
            lambda: runtime.accept_preview("p1", 1000, final_text="a\nCUSTOM\nc\n"),
        )
        driver.drain(1500)

    log_path = record_session(
        tmp_path, SUGGEST_PREVIEW, ScriptedProvider(responses=list(responses)), actions
    )
    replay_and_compare(tmp_path, log_path, ScriptedProvider(responses=list(responses)))


def test_persistent_condition_with_echo_provider_replays(tmp_path):
    def actions(driver, runtime):
        driver.run_at(300, lambda: runtime.apply_edit("d1", "total = 0", 300))
        driver.run_at(7000, lambda: runtime.post_chat("What does this do?", 7000))
        driver.run_at(12000, lambda: runtime.apply_edit("d1", "total = 0\nprint(total)", 12000))
        driver.run_at(15000, lambda: runtime.manual_request(15000))
        driver.drain(30000)  # several persistent batches regenerate on ticks

    log_path = record_session(tmp_path, PERSISTENT_SUGGEST, EchoProvider(), actions)
    _, events, _ = read_log(log_path)
    generated = [e for e in events if e.kind == "suggestions_generated"]
    assert len(generated) >= 3  # the short cooldown produced repeated batches
    replay_and_compare(tmp_path, log_path, EchoProvider())


def test_provider_errors_replay_identically(tmp_path):
    def actions(driver, runtime):
        driver.run_at(500, lambda: runtime.apply_edit("d1", "x = 1", 500))
        driver.advance_to(6500)  # generation fails: provider exhausted
        driver.run_at(8000, lambda: runtime.post_chat("hello?", 8000))
        driver.drain(10000)

    log_path = record_session(
        tmp_path, SUGGEST, ScriptedProvider(responses=[]), actions
    )
    _, events, _ = read_log(log_path)
    assert any(e.kind == "provider_error" for e in events)
    replay_and_compare(tmp_path, log_path, ScriptedProvider(responses=[]))


def test_baseline_chat_session_replays(tmp_path):
    def actions(driver, runtime):
        driver.run_at(400, lambda: runtime.apply_edit("d1", "print('hi')", 400))
        driver.run_at(1000, lambda: runtime.post_chat("Explain this file.", 1000))
        driver.drain(9000)  # no generations may appear under baseline

    log_path = record_session(tmp_path, BASELINE, EchoProvider(), actions)
    _, events, _ = read_log(log_path)
    assert not any(e.kind == "suggestions_generated" for e in events)
    replay_and_compare(tmp_path, log_path, EchoProvider())


def test_replay_rejects_malformed_log(tmp_path):
    log_path = record_session(
        tmp_path,
        BASELINE,
        EchoProvider(),
        lambda driver, runtime: driver.run_at(
            100, lambda: runtime.apply_edit("d1", "x", 100)
        ),
    )
    with log_path.open("a", encoding="utf-8") as handle:
        handle.write("{not json\n")
    with pytest.raises(ValidationError, match="malformed"):
        replay_log(log_path, EchoProvider(), tmp_path / "replayed")


def test_replay_rejects_log_without_session_created(tmp_path):
    bogus = tmp_path / "bogus.jsonl"
    header = json.dumps({"schema_version": 1}, separators=(",", ":"))
    record = json.dumps(
        {
            "session_id": "x",
            "condition_name": "baseline",
            "task_id": None,
            "seq": 1,
            "ts_ms": 0,
            "kind": "task_start",
            "payload": {"task_id": "storefront"},
        },
        sort_keys=True,
        separators=(",", ":"),
    )
    bogus.write_text(header + "\n" + record + "\n", encoding="utf-8")
    with pytest.raises(ValidationError, match="session_created"):
        replay_log(bogus, EchoProvider(), tmp_path / "replayed")


def test_normalized_log_text_masks_only_session_id(tmp_path):
    log_path = record_session(
        tmp_path,
        BASELINE,
        EchoProvider(),
        lambda driver, runtime: driver.run_at(
            100, lambda: runtime.apply_edit("d1", "x", 100)
        ),
    )
    masked = normalized_log_text(log_path)
    assert '"session_id":"SESSION"' in masked
    assert "original" not in masked


def test_replay_of_a_replay_is_stable(tmp_path):
    log_path = record_session(
        tmp_path,
        BASELINE,
        EchoProvider(),
        lambda driver, runtime: (
            driver.run_at(100, lambda: runtime.apply_edit("d1", "x = 1", 100)),
            driver.run_at(900, lambda: runtime.post_chat("hi", 900)),
            driver.drain(4000),
        ),
    )
    first = replay_log(log_path, EchoProvider(), tmp_path / "r1", session_id="replay-1")
    second = replay_log(first.log_path, EchoProvider(), tmp_path / "r2", session_id="replay-2")
    assert logs_equivalent(first.log_path, second.log_path)
    assert logs_equivalent(log_path, second.log_path)
