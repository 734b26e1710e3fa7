"""Experiment condition assignment and task counterbalancing.

Each participant works under two conditions: baseline (within-subjects)
plus one proactive variant assigned round-robin by seed (between-
subjects). Presentation order is randomized per seed, and task types
are mirrored across the two condition blocks: the same type appears in
the same slot of each block, but with a different task instance, so no
participant sees a task twice and no condition is confounded with a
task type.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .conditions import BASELINE, PROACTIVE_VARIANTS
from .errors import ConfigurationError
from .tasks import TaskRegistry

INSTANCES_PER_TYPE = 2


@dataclass(frozen=True)
class ConditionBlock:
    condition_name: str
    task_ids: tuple[str, ...]


@dataclass(frozen=True)
class Assignment:
    participant_seed: int
    proactive_variant: str
    order: tuple[str, ...]
    task_schedule: tuple[ConditionBlock, ...]

    def to_payload(self) -> dict:
        return {
            "participant_seed": self.participant_seed,
            "proactive_variant": self.proactive_variant,
            "order": list(self.order),
            "task_schedule": [
                {"condition_name": b.condition_name, "task_ids": list(b.task_ids)}
                for b in self.task_schedule
            ],
        }


def assign_condition(participant_seed: int, registry: TaskRegistry | None = None) -> Assignment:
    """Deterministic schedule for one participant seed."""
    registry = registry or TaskRegistry()
    by_type: dict[str, list] = {}
    for task in registry.all():
        by_type.setdefault(task.task_type, []).append(task)
    if not by_type:
        raise ConfigurationError("task registry is empty")
    for task_type, tasks in sorted(by_type.items()):
        if len(tasks) != INSTANCES_PER_TYPE:
            raise ConfigurationError(
                f"task type {task_type!r} has {len(tasks)} tasks, need {INSTANCES_PER_TYPE}"
            )

    # Round-robin over seeds keeps variant counts balanced exactly.
    variant = PROACTIVE_VARIANTS[participant_seed % len(PROACTIVE_VARIANTS)]

    rng = random.Random(participant_seed)
    order = [BASELINE.name, variant]
    rng.shuffle(order)

    type_order = sorted(by_type)
    rng.shuffle(type_order)

    # One instance of each type per block, same type order in both.
    block_tasks: list[list[str]] = [[], []]
    for task_type in type_order:
        instances = sorted(t.task_id for t in by_type[task_type])
        rng.shuffle(instances)
        block_tasks[0].append(instances[0])
        block_tasks[1].append(instances[1])

    schedule = tuple(
        ConditionBlock(condition_name=name, task_ids=tuple(tasks))
        for name, tasks in zip(order, block_tasks)
    )
    return Assignment(
        participant_seed=participant_seed,
        proactive_variant=variant,
        order=tuple(order),
        task_schedule=schedule,
    )
