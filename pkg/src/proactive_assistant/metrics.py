"""Interaction metrics over telemetry logs.

Counts the per-task interaction frequencies (expands, copies, previews,
manual requests, accepts, deletes) and reports mean and standard error
per condition. Tasks are delimited by task_start/task_submit events;
events after a submit still attach to the most recent task_start, and
events before any task_start are outside every task and not counted.

Two weightings: "task" pools every per-task count (SE over task
observations) and "participant" averages within each participant first
(SE over participants). Significance testing is out of scope; the raw
per-participant table is exposed for external analysis.
"""

from __future__ import annotations

import statistics
from dataclasses import dataclass, field
from pathlib import Path

from .errors import ValidationError
from .telemetry import TelemetryEvent, read_events

METRIC_KINDS = {
    "suggestion_expand": "expands",
    "suggestion_copy": "copies",
    "suggestion_preview": "previews",
    "suggestion_request": "manual_requests",
    "suggestion_accept": "accepts",
    "suggestion_delete": "deletes",
}

METRIC_NAMES = ("expands", "copies", "previews", "manual_requests", "accepts", "deletes")

WEIGHTINGS = ("task", "participant")

ALL_CONDITIONS = "all"


@dataclass(frozen=True)
class MetricStat:
    mean: float
    se: float
    n: int


@dataclass(frozen=True)
class TaskObservation:
    """One participant working one task under one condition."""

    session_id: str
    participant_id: str
    condition_name: str
    task_id: str | None
    counts: dict

    def count(self, metric: str) -> int:
        return self.counts.get(metric, 0)


@dataclass
class InteractionMetrics:
    weighting: str
    # condition (or "all") -> metric -> stat
    stats: dict[str, dict[str, MetricStat]]
    acceptance_by_category: dict[str, int]
    deletion_by_category: dict[str, int]
    observations: list[TaskObservation] = field(default_factory=list)
    skipped_lines: int = 0

    def stat(self, metric: str, condition: str = ALL_CONDITIONS) -> MetricStat:
        return self.stats.get(condition, {}).get(metric, MetricStat(0.0, 0.0, 0))


def _mean_se(values: list[float]) -> MetricStat:
    n = len(values)
    if n == 0:
        return MetricStat(0.0, 0.0, 0)
    mean = statistics.fmean(values)
    if n == 1:
        return MetricStat(mean, 0.0, 1)
    se = statistics.stdev(values) / (n ** 0.5)
    return MetricStat(mean, se, n)


def _collect_observations(events: list[TelemetryEvent]) -> list[TaskObservation]:
    participants: dict[str, str] = {}
    conditions: dict[str, str] = {}
    current: dict[str, TaskObservation | None] = {}
    observations: list[TaskObservation] = []

    for event in events:
        sid = event.session_id
        if event.kind == "session_created":
            conditions[sid] = event.condition_name
            participants[sid] = event.payload.get("participant_id") or sid
        elif event.kind == "task_start":
            observation = TaskObservation(
                session_id=sid,
                participant_id=participants.get(sid, sid),
                condition_name=conditions.get(sid, event.condition_name),
                task_id=event.payload.get("task_id"),
                counts={},
            )
            observations.append(observation)
            current[sid] = observation
        else:
            metric = METRIC_KINDS.get(event.kind)
            if metric is None:
                continue
            observation = current.get(sid)
            if observation is not None:
                observation.counts[metric] = observation.counts.get(metric, 0) + 1
    return observations


def _stats_for(observations: list[TaskObservation], weighting: str) -> dict[str, MetricStat]:
    result = {}
    for metric in METRIC_NAMES:
        if weighting == "task":
            values = [float(o.count(metric)) for o in observations]
        else:
            per_participant: dict[str, list[float]] = {}
            for o in observations:
                per_participant.setdefault(o.participant_id, []).append(float(o.count(metric)))
            values = [statistics.fmean(v) for v in per_participant.values()]
        result[metric] = _mean_se(values)
    return result


def compute_metrics_from_events(
    events: list[TelemetryEvent], weighting: str = "task", skipped_lines: int = 0
) -> InteractionMetrics:
    if weighting not in WEIGHTINGS:
        raise ValidationError(f"weighting must be one of {WEIGHTINGS}, got {weighting!r}")
    observations = _collect_observations(events)

    stats: dict[str, dict[str, MetricStat]] = {
        ALL_CONDITIONS: _stats_for(observations, weighting)
    }
    by_condition: dict[str, list[TaskObservation]] = {}
    for o in observations:
        by_condition.setdefault(o.condition_name, []).append(o)
    for condition, group in sorted(by_condition.items()):
        stats[condition] = _stats_for(group, weighting)

    accepts: dict[str, int] = {}
    deletes: dict[str, int] = {}
    for event in events:
        category = event.payload.get("category")
        if not category:
            continue
        if event.kind == "suggestion_accept":
            accepts[category] = accepts.get(category, 0) + 1
        elif event.kind == "suggestion_delete":
            deletes[category] = deletes.get(category, 0) + 1

    return InteractionMetrics(
        weighting=weighting,
        stats=stats,
        acceptance_by_category=dict(sorted(accepts.items())),
        deletion_by_category=dict(sorted(deletes.items())),
        observations=observations,
        skipped_lines=skipped_lines,
    )


def compute_metrics(log_paths: list[str | Path], weighting: str = "task") -> InteractionMetrics:
    events, skipped = read_events(list(log_paths))
    return compute_metrics_from_events(events, weighting=weighting, skipped_lines=skipped)
