"""Proactivity timing state machine.

Decides when suggestion batches are requested, displayed, or discarded,
based on what the user is doing:

* While the user is busy (typing code or chat, sending a message, waiting
  for a reply, interacting with a suggestion) no batch is requested, and a
  typing grace period keeps short pauses from counting as idle.
* Once the user has been idle for ``idle_threshold_s`` and at least
  ``cooldown_s`` have passed since the last displayed batch, interaction,
  or chat message, a standard generation starts.
* A run that errors starts a debugging generation immediately, skipping
  both the idle wait and the cooldown.
* Every generation carries a token. User activity invalidates outstanding
  tokens, so late arrivals are discarded instead of displayed.

``on_event`` is a pure function of ``(state, config, event)``: no clock
reads, no I/O. The hosting session feeds it one event at a time and acts
on the returned decision.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, replace

from .conditions import ConditionConfig
from .errors import ContractError, UnsupportedInConditionError


class EventKind(enum.Enum):
    USER_TYPING = "user_typing"
    CHAT_TYPING = "chat_typing"
    CHAT_SEND = "chat_send"
    CHAT_RESPONSE_ARRIVED = "chat_response_arrived"
    SUGGESTION_INTERACTION = "suggestion_interaction"
    RUN_COMPLETED = "run_completed"
    MANUAL_REQUEST = "manual_request"
    CLOCK_TICK = "clock_tick"
    # Completion of an in-flight generation re-enters the event stream so
    # the stale-token check happens in one place.
    GENERATION_COMPLETED = "generation_completed"


class Mode(enum.Enum):
    ACCELERATION = "acceleration"
    EXPLORATION = "exploration"
    DEBUGGING = "debugging"


class GenerationKind(enum.Enum):
    STANDARD = "standard"
    DEBUG = "debug"


class Action(enum.Enum):
    NONE = "none"
    START_GENERATION = "start_generation"
    DISPLAY_BATCH = "display_batch"
    DISCARD_BATCH = "discard_batch"


@dataclass(frozen=True)
class ActivityEvent:
    kind: EventKind
    ts_ms: int
    is_error: bool = False  # run_completed only
    token: int | None = None  # generation_completed only


@dataclass(frozen=True)
class Decision:
    action: Action
    kind: GenerationKind | None = None
    token: int | None = None


NONE = Decision(Action.NONE)


@dataclass(frozen=True)
class PendingGeneration:
    token: int
    kind: GenerationKind
    requested_ts: int


@dataclass(frozen=True)
class TimingState:
    """Immutable snapshot of the timing machine between events."""

    last_event_ts: int
    last_activity_ts: int
    last_typing_ts: int | None = None
    # Anchor of the cooldown window: last displayed batch, suggestion
    # interaction, or chat message.
    last_relevant_ts: int | None = None
    awaiting_chat_reply: bool = False
    generation_token: int = 0
    pending: PendingGeneration | None = None
    # Set when the most recent run errored; cleared by a code edit or a
    # clean run. While set, the session is in debugging mode.
    run_error_ts: int | None = None

    def typing_active(self, cfg: ConditionConfig, now_ms: int) -> bool:
        if self.last_typing_ts is None:
            return False
        return now_ms - self.last_typing_ts < cfg.typing_grace_ms

    def cooldown_satisfied(self, cfg: ConditionConfig, now_ms: int) -> bool:
        if self.last_relevant_ts is None:
            return True
        return now_ms - self.last_relevant_ts >= cfg.cooldown_ms

    def idle_elapsed(self, cfg: ConditionConfig, now_ms: int) -> bool:
        return now_ms - self.last_activity_ts >= cfg.idle_threshold_ms


def initial_state(created_at_ms: int) -> TimingState:
    return TimingState(last_event_ts=created_at_ms, last_activity_ts=created_at_ms)


def classify_mode(state: TimingState, cfg: ConditionConfig, now_ms: int) -> Mode:
    """Debugging beats acceleration beats exploration."""
    if state.run_error_ts is not None:
        return Mode.DEBUGGING
    if (
        state.typing_active(cfg, now_ms)
        or state.awaiting_chat_reply
        or not state.idle_elapsed(cfg, now_ms)
    ):
        return Mode.ACCELERATION
    return Mode.EXPLORATION


def _invalidate(state: TimingState) -> TimingState:
    """Bump the token; any in-flight generation becomes stale."""
    return replace(state, generation_token=state.generation_token + 1, pending=None)


def on_event(
    state: TimingState, cfg: ConditionConfig, ev: ActivityEvent
) -> tuple[TimingState, Decision]:
    """Advance the machine by one event and return the decision to act on."""
    if ev.ts_ms < state.last_event_ts:
        raise ContractError(
            f"out-of-order event: {ev.kind.value} at {ev.ts_ms} after {state.last_event_ts}"
        )
    ts = ev.ts_ms
    state = replace(state, last_event_ts=ts)

    if ev.kind is EventKind.USER_TYPING:
        state = _invalidate(replace(state, last_activity_ts=ts, last_typing_ts=ts, run_error_ts=None))
        return state, NONE

    if ev.kind is EventKind.CHAT_TYPING:
        # Same suppression as code typing, but not a code edit: stays in
        # debugging mode if a run just errored.
        state = _invalidate(replace(state, last_activity_ts=ts, last_typing_ts=ts))
        return state, NONE

    if ev.kind is EventKind.CHAT_SEND:
        state = _invalidate(
            replace(state, last_activity_ts=ts, last_relevant_ts=ts, awaiting_chat_reply=True)
        )
        return state, NONE

    if ev.kind is EventKind.CHAT_RESPONSE_ARRIVED:
        return replace(state, awaiting_chat_reply=False, last_relevant_ts=ts), NONE

    if ev.kind is EventKind.SUGGESTION_INTERACTION:
        return replace(state, last_activity_ts=ts, last_relevant_ts=ts), NONE

    if ev.kind is EventKind.RUN_COMPLETED:
        # Pressing Run is a deliberate pause: typing grace ends now so a
        # debug batch is displayable as soon as it arrives.
        state = replace(state, last_activity_ts=ts, last_typing_ts=None)
        if not ev.is_error:
            return replace(state, run_error_ts=None), NONE
        state = replace(state, run_error_ts=ts)
        if not cfg.proactive_enabled:
            return state, NONE
        token = state.generation_token + 1
        state = replace(
            state,
            generation_token=token,
            pending=PendingGeneration(token, GenerationKind.DEBUG, ts),
            # Debug batches skip the cooldown but re-arm it, so a standard
            # batch cannot pile on right behind.
            last_relevant_ts=ts,
        )
        return state, Decision(Action.START_GENERATION, GenerationKind.DEBUG, token)

    if ev.kind is EventKind.MANUAL_REQUEST:
        if not cfg.proactive_enabled:
            raise UnsupportedInConditionError(
                "manual suggestion requests are not available in this condition"
            )
        # Explicit user intent wins: bypass idle threshold and cooldown,
        # supersede any pending generation, and end the typing grace so the
        # requested batch can actually be shown.
        token = state.generation_token + 1
        state = replace(
            state,
            last_activity_ts=ts,
            last_typing_ts=None,
            generation_token=token,
            pending=PendingGeneration(token, GenerationKind.STANDARD, ts),
        )
        return state, Decision(Action.START_GENERATION, GenerationKind.STANDARD, token)

    if ev.kind is EventKind.CLOCK_TICK:
        if (
            cfg.proactive_enabled
            and state.pending is None
            and classify_mode(state, cfg, ts) is Mode.EXPLORATION
            and state.cooldown_satisfied(cfg, ts)
        ):
            token = state.generation_token + 1
            state = replace(
                state,
                generation_token=token,
                pending=PendingGeneration(token, GenerationKind.STANDARD, ts),
            )
            return state, Decision(Action.START_GENERATION, GenerationKind.STANDARD, token)
        return state, NONE

    if ev.kind is EventKind.GENERATION_COMPLETED:
        if ev.token is None:
            raise ContractError("generation_completed event requires a token")
        pending = state.pending
        fresh = (
            pending is not None
            and ev.token == pending.token
            and ev.token == state.generation_token
        )
        if not fresh:
            return state, Decision(Action.DISCARD_BATCH, token=ev.token)
        assert pending is not None
        # Busy checks are defensive: activity after the request already
        # bumped the token, so a fresh token implies a quiet interval.
        if state.typing_active(cfg, ts) or state.awaiting_chat_reply:
            return replace(state, pending=None), Decision(
                Action.DISCARD_BATCH, pending.kind, ev.token
            )
        state = replace(state, pending=None, last_relevant_ts=ts)
        return state, Decision(Action.DISPLAY_BATCH, pending.kind, ev.token)

    raise ContractError(f"unhandled event kind: {ev.kind!r}")


def on_manual_request(
    state: TimingState, cfg: ConditionConfig, ts_ms: int
) -> tuple[TimingState, Decision]:
    """Convenience wrapper for an explicit user request."""
    return on_event(state, cfg, ActivityEvent(EventKind.MANUAL_REQUEST, ts_ms))


def fold_events(
    cfg: ConditionConfig, events: list[ActivityEvent], state: TimingState | None = None
) -> tuple[TimingState, list[Decision]]:
    """Run a whole trace, collecting one decision per event."""
    if state is None:
        start = events[0].ts_ms if events else 0
        state = initial_state(start)
    decisions = []
    for ev in events:
        state, decision = on_event(state, cfg, ev)
        decisions.append(decision)
    return state, decisions
