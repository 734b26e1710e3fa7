"""Drive one suggest_preview session on a virtual clock, then replay it.

Everything here is deterministic: the provider is scripted, the runner
is scripted, and time only moves when the driver advances it. The same
log therefore falls out of the replay, byte for byte, modulo the
session id.

Run from the repository root:

    python3 demos/deterministic_session.py
"""

import json
import tempfile
from pathlib import Path

from proactive_assistant import (
    SUGGEST_PREVIEW,
    DeterministicDriver,
    RawRunOutput,
    ScriptedProvider,
    ScriptedRunner,
    SessionRuntime,
    TaskRegistry,
    TelemetryWriter,
    logs_equivalent,
    read_log,
    replay_log,
)

BATCH = "```json\n" + json.dumps(
    [
        {
            "type": "Completing unfinished code",
            "summary": "track prices next to item names",
            "code": "prices[name] = price\n",
        },
        {
            "type": "Adding unit tests",
            "summary": "cover add_item with a first test",
            "code": "def test_add_item():\n    add_item('pen', 3)\n    assert 'pen' in items\n",
        },
        {
            "type": "Improving efficiency and modularity",
            "summary": "keep items and prices in one dict",
        },
    ]
) + "\n```"

EDIT = "items = []\nprices = {}\n\ndef add_item(name, price):\n    items.append(name)\n"

INTEGRATED = (
    "items = []\n"
    "prices = {}\n"
    "\n"
    "def add_item(name, price):\n"
    "    items.append(name)\n"
    "    prices[name] = price\n"
)

RESPONSES = [
    (BATCH, 300),
    ("```python\n" + INTEGRATED + "```", 200),
    (BATCH, 250),  # debug batch after the erroring run
]

ERROR_RUN = RawRunOutput(
    stdout="",
    stderr="Traceback (most recent call last):\nNameError: name 'total' is not defined",
    exit_status=1,
    duration_ms=500,
)


def record(out_dir: Path) -> Path:
    writer = TelemetryWriter(out_dir)
    driver = DeterministicDriver(start_ts_ms=0)
    runtime = SessionRuntime.create(
        SUGGEST_PREVIEW,
        provider=ScriptedProvider(responses=list(RESPONSES)),
        telemetry=writer,
        dispatcher=driver,
        ts_ms=0,
        runner=ScriptedRunner([ERROR_RUN]),
        task=TaskRegistry().get("storefront"),
        session_id="demo",
    )
    driver.attach(runtime)

    # One edit, then five seconds of idle: the batch triggers at 6000
    # (tick at the idle threshold) and displays at 6300 (provider latency).
    driver.run_at(1_000, lambda: runtime.apply_edit("d1", EDIT, 1_000))
    driver.advance_to(7_000)

    # Expand the first card, preview it, and accept only the first hunk.
    driver.run_at(8_000, lambda: runtime.expand_suggestion("s1", 8_000))
    preview_id = driver.run_at(10_000, lambda: runtime.request_preview("s1", 10_000))
    driver.advance_to(10_500)
    driver.run_at(12_000, lambda: runtime.accept_preview(preview_id, 12_000, selected_hunks=[0]))

    # An erroring run fires a debug batch in the same event step.
    driver.run_at(20_000, lambda: runtime.run_code("d1", 20_000))
    driver.drain(25_000)
    writer.close()
    return out_dir / "demo.jsonl"


def main() -> None:
    root = Path(tempfile.mkdtemp(prefix="assistant-demo-"))
    log_path = record(root / "original")

    _, events, _ = read_log(log_path)
    print(f"recorded {len(events)} events -> {log_path}")
    for event in events:
        print(f"  {event.ts_ms:>6} ms  seq {event.seq:>2}  {event.kind}")

    result = replay_log(log_path, ScriptedProvider(responses=list(RESPONSES)), root / "replayed")
    same = logs_equivalent(log_path, result.log_path)
    print(f"replayed {result.actions_replayed} user actions -> {result.log_path}")
    print("byte-identical modulo session id:", same)
    assert same


if __name__ == "__main__":
    main()
