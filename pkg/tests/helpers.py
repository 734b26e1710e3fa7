"""Shared test helpers.

The timing simulator runs the pure state machine closed-loop: user
events and clock ticks go in, and whenever the machine asks for a
generation the simulator schedules its completion after a configurable
latency, exactly like the session runtime does. A shadow model tracks
staleness, busyness, cooldown anchoring, and pending generations
independently of TimingState, so the invariant checks do not trust the
machine they are checking. Both directions are checked: forbidden
starts/displays are violations, and so are missed tick triggers.
"""

from __future__ import annotations

import heapq
import random
from dataclasses import dataclass, field

from proactive_assistant.conditions import ConditionConfig
from proactive_assistant.timing import (
    Action,
    ActivityEvent,
    EventKind,
    GenerationKind,
    TimingState,
    initial_state,
    on_event,
)

# Heap priorities: completions land before ticks, ticks before user
# events carrying the same timestamp (mirrors the runtime dispatcher).
PRI_COMPLETION = 0
PRI_TICK = 1
PRI_USER = 2

ACTIVITY_KINDS = {
    EventKind.USER_TYPING,
    EventKind.CHAT_TYPING,
    EventKind.CHAT_SEND,
    EventKind.SUGGESTION_INTERACTION,
    EventKind.RUN_COMPLETED,
    EventKind.MANUAL_REQUEST,
}

# Shadow model: these kinds invalidate any in-flight generation.
INVALIDATING_KINDS = {EventKind.USER_TYPING, EventKind.CHAT_TYPING, EventKind.CHAT_SEND}


@dataclass(frozen=True)
class SimEvent:
    ts: int
    kind: EventKind
    is_error: bool = False


@dataclass
class SimResult:
    displays: list = field(default_factory=list)  # (ts, GenerationKind, token)
    discards: list = field(default_factory=list)  # (ts, token)
    starts: list = field(default_factory=list)  # (ts, GenerationKind, token, trigger kind)
    violations: list = field(default_factory=list)
    final_state: TimingState | None = None

    @property
    def display_times(self) -> list:
        return [ts for ts, _, _ in self.displays]

    def display_count(self, kind: GenerationKind | None = None) -> int:
        if kind is None:
            return len(self.displays)
        return sum(1 for _, k, _ in self.displays if k is kind)


class _Shadow:
    """Independent reimplementation of the timing rules, for checking."""

    def __init__(self) -> None:
        self.stale: set[int] = set()
        self.pending_token: int | None = None
        self.last_typing: int | None = None
        self.last_activity = 0
        self.last_relevant: int | None = None
        self.awaiting = False
        self.run_error = False
        self.trigger_of: dict[int, EventKind] = {}
        self.last_display_ts: int | None = None

    def typing_active(self, cfg: ConditionConfig, ts: int) -> bool:
        return self.last_typing is not None and ts - self.last_typing < cfg.typing_grace_ms

    def tick_should_start(self, cfg: ConditionConfig, ts: int) -> bool:
        return (
            cfg.proactive_enabled
            and self.pending_token is None
            and not self.run_error
            and not self.awaiting
            and not self.typing_active(cfg, ts)
            and ts - self.last_activity >= cfg.idle_threshold_ms
            and (self.last_relevant is None or ts - self.last_relevant >= cfg.cooldown_ms)
        )

    def observe(self, ev: ActivityEvent) -> None:
        ts = ev.ts_ms
        if ev.kind in INVALIDATING_KINDS:
            self.stale.update(t for t in (self.pending_token,) if t is not None)
            self.pending_token = None
        if ev.kind in (EventKind.USER_TYPING, EventKind.CHAT_TYPING):
            self.last_typing = ts
        if ev.kind is EventKind.USER_TYPING:
            self.run_error = False
        if ev.kind is EventKind.CHAT_SEND:
            self.awaiting = True
            self.last_relevant = ts
        if ev.kind is EventKind.CHAT_RESPONSE_ARRIVED:
            self.awaiting = False
            self.last_relevant = ts
        if ev.kind is EventKind.SUGGESTION_INTERACTION:
            self.last_relevant = ts
        if ev.kind is EventKind.RUN_COMPLETED:
            self.last_typing = None
            self.run_error = ev.is_error
        if ev.kind is EventKind.MANUAL_REQUEST:
            self.last_typing = None
        if ev.kind in ACTIVITY_KINDS:
            self.last_activity = ts

    def on_start(self, token: int, ts: int, trigger: EventKind, debug: bool) -> None:
        if self.pending_token is not None:
            self.stale.add(self.pending_token)
        self.pending_token = token
        self.trigger_of[token] = trigger
        if debug:
            self.last_relevant = ts

    def on_completion(self, token: int, ts: int, displayed: bool) -> None:
        if token == self.pending_token:
            self.pending_token = None
        if displayed:
            self.last_relevant = ts
            self.last_display_ts = ts


def simulate(
    cfg: ConditionConfig,
    user_events: list[SimEvent],
    horizon_ms: int,
    latency_fn=None,
    tick_ms: int = 1000,
    auto_ticks: bool = True,
) -> SimResult:
    latency_fn = latency_fn or (lambda index: 0)
    result = SimResult()
    state = initial_state(0)
    shadow = _Shadow()

    heap: list[tuple[int, int, int, ActivityEvent]] = []
    seq = 0

    def push(ts: int, priority: int, payload: ActivityEvent) -> None:
        nonlocal seq
        seq += 1
        heapq.heappush(heap, (ts, priority, seq, payload))

    if auto_ticks:
        for k in range(1, horizon_ms // tick_ms + 1):
            push(k * tick_ms, PRI_TICK, ActivityEvent(EventKind.CLOCK_TICK, k * tick_ms))
    for ev in user_events:
        if ev.ts > horizon_ms:
            continue
        priority = PRI_TICK if ev.kind is EventKind.CLOCK_TICK else PRI_USER
        push(ev.ts, priority, ActivityEvent(ev.kind, ev.ts, is_error=ev.is_error))

    generation_index = 0

    def check(condition: bool, message: str) -> None:
        if not condition:
            result.violations.append(message)

    while heap:
        ts, _, _, ev = heapq.heappop(heap)
        if ev.kind is EventKind.CLOCK_TICK:
            expected = shadow.tick_should_start(cfg, ts)
        state, decision = on_event(state, cfg, ev)

        if ev.kind is EventKind.CLOCK_TICK:
            check(
                (decision.action is Action.START_GENERATION) == expected,
                f"tick at {ts}: start={decision.action is Action.START_GENERATION}, "
                f"shadow expected {expected}",
            )

        if decision.action is Action.START_GENERATION:
            check(cfg.proactive_enabled, f"start under non-proactive condition at {ts}")
            is_debug = decision.kind is GenerationKind.DEBUG
            check(
                is_debug == (ev.kind is EventKind.RUN_COMPLETED and ev.is_error),
                f"debug start not aligned with erroring run at {ts}",
            )
            shadow.on_start(decision.token, ts, ev.kind, is_debug)
            result.starts.append((ts, decision.kind, decision.token, ev.kind))
            latency = latency_fn(generation_index)
            generation_index += 1
            push(
                ts + latency,
                PRI_COMPLETION,
                ActivityEvent(EventKind.GENERATION_COMPLETED, ts + latency, token=decision.token),
            )
        elif decision.action is Action.DISPLAY_BATCH:
            check(decision.token not in shadow.stale, f"stale token displayed at {ts}")
            check(not shadow.typing_active(cfg, ts), f"display while typing at {ts}")
            check(not shadow.awaiting, f"display while awaiting chat reply at {ts}")
            if shadow.trigger_of.get(decision.token) is EventKind.CLOCK_TICK:
                check(
                    shadow.last_display_ts is None
                    or ts - shadow.last_display_ts >= cfg.cooldown_ms,
                    f"proactive standard display inside cooldown at {ts}",
                )
            shadow.on_completion(decision.token, ts, displayed=True)
            result.displays.append((ts, decision.kind, decision.token))
        elif decision.action is Action.DISCARD_BATCH:
            shadow.on_completion(decision.token, ts, displayed=False)
            result.discards.append((ts, decision.token))
        elif ev.kind is EventKind.GENERATION_COMPLETED:
            result.violations.append(f"completion fell through at {ts}")

        if ev.kind is EventKind.GENERATION_COMPLETED and decision.token in shadow.stale:
            check(
                decision.action is Action.DISCARD_BATCH,
                f"shadow-stale completion not discarded at {ts}",
            )
        shadow.observe(ev)

    result.final_state = state
    return result


def random_trace(seed: int, horizon_ms: int = 120_000, allow_manual: bool = True):
    """Random user behavior: bursts of activity separated by idle gaps.

    Returns (events, longest_gap_ms). Chat sends always get a response
    1-3 s later so the machine never waits forever.
    """
    rng = random.Random(seed)
    events: list[SimEvent] = []
    ts = rng.randrange(0, 2000)
    longest_gap = ts
    unresolved_error = False
    while ts < horizon_ms:
        burst = rng.choice(("typing", "chat", "run", "interaction", "manual"))
        if burst == "typing":
            for _ in range(rng.randrange(1, 6)):
                events.append(SimEvent(ts, EventKind.USER_TYPING))
                ts += rng.randrange(100, 1500)
            unresolved_error = False
        elif burst == "chat":
            events.append(SimEvent(ts, EventKind.CHAT_SEND))
            reply_delay = rng.randrange(1000, 3000)
            events.append(SimEvent(ts + reply_delay, EventKind.CHAT_RESPONSE_ARRIVED))
            ts += reply_delay + rng.randrange(0, 500)
        elif burst == "run":
            is_error = rng.random() < 0.4
            events.append(SimEvent(ts, EventKind.RUN_COMPLETED, is_error=is_error))
            ts += rng.randrange(100, 1000)
            unresolved_error = is_error
        elif burst == "interaction":
            events.append(SimEvent(ts, EventKind.SUGGESTION_INTERACTION))
            ts += rng.randrange(100, 1000)
        elif burst == "manual" and allow_manual:
            events.append(SimEvent(ts, EventKind.MANUAL_REQUEST))
            ts += rng.randrange(100, 1000)
        # Idle gap; occasionally a long one. A user never walks away for
        # a whole minute right after an unhandled error, so long gaps
        # start with an edit (debugging mode otherwise freezes standard
        # batches and long-gap traces would tell us nothing).
        long_gap = rng.random() < 0.25
        if long_gap and unresolved_error:
            events.append(SimEvent(ts, EventKind.USER_TYPING))
            ts += rng.randrange(100, 500)
            unresolved_error = False
        gap = rng.randrange(65_000, 95_000) if long_gap else rng.randrange(500, 20_000)
        longest_gap = max(longest_gap, min(gap, horizon_ms - ts))
        ts += gap
    return [e for e in events if e.ts <= horizon_ms], longest_gap


def random_latencies(seed: int, cap_ms: int = 8000):
    rng = random.Random(seed)

    def latency(_index: int) -> int:
        return rng.randrange(0, cap_ms)

    return latency
