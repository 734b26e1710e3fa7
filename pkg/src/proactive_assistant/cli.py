"""Command-line entry points: analyze, replay, schedule, serve."""

from __future__ import annotations

import argparse
import csv
import json
import sys
import tempfile

from .errors import AssistantError
from .metrics import ALL_CONDITIONS, METRIC_NAMES, InteractionMetrics, compute_metrics
from .replaying import logs_equivalent, replay_log
from .scheduling import assign_condition

ANALYZE_COLUMNS = ("metric", "condition", "mean", "se", "n")


def _metric_rows(metrics: InteractionMetrics, by_condition: bool) -> list[tuple]:
    conditions = [c for c in metrics.stats if c != ALL_CONDITIONS] if by_condition else []
    conditions = conditions or [ALL_CONDITIONS]
    rows = []
    for metric in METRIC_NAMES:
        for condition in conditions:
            stat = metrics.stat(metric, condition)
            rows.append((metric, condition, f"{stat.mean:.3f}", f"{stat.se:.3f}", stat.n))
    return rows


def _print_table(headers: tuple, rows: list[tuple], out) -> None:
    widths = [len(str(h)) for h in headers]
    for row in rows:
        widths = [max(w, len(str(cell))) for w, cell in zip(widths, row)]
    line = "  ".join(str(h).ljust(w) for h, w in zip(headers, widths))
    print(line, file=out)
    print("  ".join("-" * w for w in widths), file=out)
    for row in rows:
        print("  ".join(str(cell).ljust(w) for cell, w in zip(row, widths)), file=out)


def _print_csv(headers: tuple, rows: list[tuple], out) -> None:
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(headers)
    writer.writerows(rows)


def _cmd_analyze(args: argparse.Namespace) -> int:
    metrics = compute_metrics(args.logs, weighting=args.weighting)
    if metrics.skipped_lines:
        print(f"warning: skipped {metrics.skipped_lines} malformed lines", file=sys.stderr)
    emit = _print_csv if args.format == "csv" else _print_table
    emit(ANALYZE_COLUMNS, _metric_rows(metrics, args.by_condition), sys.stdout)
    if args.by_category:
        print(file=sys.stdout)
        rows = [("accept", cat, n) for cat, n in metrics.acceptance_by_category.items()]
        rows += [("delete", cat, n) for cat, n in metrics.deletion_by_category.items()]
        emit(("interaction", "category", "count"), rows, sys.stdout)
    return 0


def _cmd_replay(args: argparse.Namespace) -> int:
    from .providers import provider_from_uri

    provider = provider_from_uri(args.provider)
    out_dir = args.out or tempfile.mkdtemp(prefix="replay-")
    result = replay_log(args.log, provider, out_dir)
    print(
        f"replayed {result.actions_replayed} actions "
        f"({result.events_in} events in) -> {result.log_path}"
    )
    if logs_equivalent(args.log, result.log_path):
        print("replay matches the original log")
        return 0
    print("replay DIVERGES from the original log", file=sys.stderr)
    return 1


def _cmd_schedule(args: argparse.Namespace) -> int:
    assignment = assign_condition(args.seed)
    if args.json:
        print(json.dumps(assignment.to_payload(), indent=2, sort_keys=True))
        return 0
    print(f"seed:             {assignment.participant_seed}")
    print(f"proactive variant: {assignment.proactive_variant}")
    print(f"condition order:  {', '.join(assignment.order)}")
    for i, block in enumerate(assignment.task_schedule, start=1):
        print(f"block {i}: {block.condition_name}: tasks {', '.join(block.task_ids)}")
    return 0


def _cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .gateway import ServerConfig, create_app, load_server_config

    if args.config:
        config = load_server_config(args.config)
    else:
        config = ServerConfig()
    if args.provider:
        config.provider_uri = args.provider
    if args.runner:
        config.runner_command = args.runner
    if args.telemetry_dir:
        config.telemetry_dir = args.telemetry_dir
    if args.conditions:
        config.condition_file = args.conditions
    if args.host:
        config.host = args.host
    if args.port:
        config.port = args.port
    app = create_app(config)
    uvicorn.run(app, host=config.host, port=config.port, log_level="info")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="proactive-assistant",
        description="Proactive programming assistant: serve sessions, analyze and replay logs.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    analyze = sub.add_parser("analyze", help="interaction metrics from telemetry logs")
    analyze.add_argument("logs", nargs="+", help="telemetry JSONL files")
    analyze.add_argument("--by-condition", action="store_true", help="split rows per condition")
    analyze.add_argument("--by-category", action="store_true", help="accept/delete counts per category")
    analyze.add_argument("--format", choices=("table", "csv"), default="table")
    analyze.add_argument("--weighting", choices=("task", "participant"), default="task",
                         help="SE over task observations (default) or per-participant means")
    analyze.set_defaults(func=_cmd_analyze)

    replay = sub.add_parser("replay", help="re-drive a recorded session deterministically")
    replay.add_argument("log", help="telemetry JSONL file of one session")
    replay.add_argument("--provider", required=True,
                        help="provider descriptor, e.g. scripted:<dir>")
    replay.add_argument("--out", help="directory for the replayed log (default: temp dir)")
    replay.set_defaults(func=_cmd_replay)

    schedule = sub.add_parser("schedule", help="condition assignment for a participant seed")
    schedule.add_argument("--seed", type=int, required=True)
    schedule.add_argument("--json", action="store_true")
    schedule.set_defaults(func=_cmd_schedule)

    serve = sub.add_parser("serve", help="run the HTTP gateway")
    serve.add_argument("--config", help="JSON server config file")
    serve.add_argument("--provider", help="provider descriptor (echo, scripted:<dir>, http:<url>,<model>)")
    serve.add_argument("--runner", help="runner command template, e.g. 'python3 {file}'")
    serve.add_argument("--telemetry-dir", help="directory for telemetry logs")
    serve.add_argument("--conditions", help="extra condition definitions file")
    serve.add_argument("--host")
    serve.add_argument("--port", type=int)
    serve.set_defaults(func=_cmd_serve)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (AssistantError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
