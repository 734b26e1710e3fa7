"""Record a few sessions offline, then summarize interaction metrics.

The echo provider needs no network or key: it derives a valid batch
from the prompt itself. Each simulated participant works one task per
condition; the metrics table at the end is the same one the
``proactive-assistant analyze`` command prints.

Run from the repository root:

    python3 demos/analyze_telemetry.py
"""

import tempfile
from pathlib import Path

from proactive_assistant import (
    BASELINE,
    PERSISTENT_SUGGEST,
    SUGGEST,
    DeterministicDriver,
    EchoProvider,
    SessionRuntime,
    TaskRegistry,
    TelemetryWriter,
    compute_metrics,
)

METRICS = ("expands", "accepts", "deletes", "manual_requests")


def simulate_participant(out_dir: Path, participant: str, condition, task_id: str) -> Path:
    writer = TelemetryWriter(out_dir)
    driver = DeterministicDriver(start_ts_ms=0)
    session_id = f"{participant}-{condition.name}"
    runtime = SessionRuntime.create(
        condition,
        provider=EchoProvider(latency_ms=200),
        telemetry=writer,
        dispatcher=driver,
        ts_ms=0,
        task=TaskRegistry().get(task_id),
        session_id=session_id,
        participant_id=participant,
    )
    driver.attach(runtime)

    driver.run_at(1_000, lambda: runtime.apply_edit("d1", "total = 0\n", 1_000))
    if condition.proactive_enabled:
        # Let one batch display, then interact with it.
        driver.advance_to(7_000)
        driver.run_at(8_000, lambda: runtime.expand_suggestion("s1", 8_000))
        driver.run_at(9_000, lambda: runtime.accept_suggestion("s1", 9_000))
        driver.run_at(10_000, lambda: runtime.expand_suggestion("s2", 10_000))
        driver.run_at(11_000, lambda: runtime.delete_suggestion("s2", 11_000))
        driver.run_at(15_000, lambda: runtime.manual_request(15_000))
        driver.advance_to(16_000)
    driver.run_at(20_000, lambda: runtime.post_chat("How would you test this?", 20_000))
    driver.run_at(30_000, lambda: runtime.submit_task(30_000))
    driver.drain(31_000)
    writer.close()
    return out_dir / f"{session_id}.jsonl"


def main() -> None:
    out_dir = Path(tempfile.mkdtemp(prefix="assistant-logs-"))
    paths = [
        simulate_participant(out_dir, "p1", SUGGEST, "storefront"),
        simulate_participant(out_dir, "p1", BASELINE, "todo_list"),
        simulate_participant(out_dir, "p2", PERSISTENT_SUGGEST, "sales_analysis"),
        simulate_participant(out_dir, "p2", BASELINE, "weather_trends"),
    ]
    print(f"wrote {len(paths)} session logs under {out_dir}\n")

    metrics = compute_metrics(paths)
    header = f"{'metric':<16}" + "".join(f"{name:>20}" for name in sorted(metrics.stats))
    print(header)
    print("-" * len(header))
    for metric in METRICS:
        row = f"{metric:<16}"
        for condition in sorted(metrics.stats):
            stat = metrics.stat(metric, condition)
            row += f"{stat.mean:>12.2f} +/- {stat.se:<4.2f}"
        print(row)
    print("\naccepts by category:", metrics.acceptance_by_category)
    print("same table via the CLI: proactive-assistant analyze", *map(str, paths))


if __name__ == "__main__":
    main()
