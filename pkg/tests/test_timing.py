"""Scripted timing traces and direct state-machine unit tests."""

import pytest

from proactive_assistant.conditions import BASELINE, SUGGEST
from proactive_assistant.errors import ContractError, UnsupportedInConditionError
from proactive_assistant.timing import (
    Action,
    ActivityEvent,
    EventKind,
    GenerationKind,
    Mode,
    classify_mode,
    fold_events,
    initial_state,
    on_event,
    on_manual_request,
)

from timing_traces import TRACES, assert_trace


@pytest.mark.parametrize("trace", TRACES, ids=[t.name for t in TRACES])
def test_scripted_trace(trace):
    assert_trace(trace)


def test_trace_table_is_large_enough():
    assert len(TRACES) >= 50
    assert len({t.name for t in TRACES}) == len(TRACES)


def test_out_of_order_event_raises():
    state = initial_state(0)
    state, _ = on_event(state, SUGGEST, ActivityEvent(EventKind.USER_TYPING, 1000))
    with pytest.raises(ContractError, match="out-of-order"):
        on_event(state, SUGGEST, ActivityEvent(EventKind.USER_TYPING, 999))


def test_equal_timestamp_events_are_fine():
    state = initial_state(0)
    state, _ = on_event(state, SUGGEST, ActivityEvent(EventKind.USER_TYPING, 1000))
    on_event(state, SUGGEST, ActivityEvent(EventKind.USER_TYPING, 1000))


def test_manual_request_unsupported_in_baseline():
    state = initial_state(0)
    with pytest.raises(UnsupportedInConditionError):
        on_manual_request(state, BASELINE, 1000)


def test_manual_request_returns_start_with_token():
    state = initial_state(0)
    state, decision = on_manual_request(state, SUGGEST, 1000)
    assert decision.action is Action.START_GENERATION
    assert decision.kind is GenerationKind.STANDARD
    assert decision.token == state.generation_token


def test_completion_without_token_raises():
    state = initial_state(0)
    with pytest.raises(ContractError, match="token"):
        on_event(state, SUGGEST, ActivityEvent(EventKind.GENERATION_COMPLETED, 1000))


def test_unknown_completion_token_discards():
    state = initial_state(0)
    state, decision = on_event(
        state, SUGGEST, ActivityEvent(EventKind.GENERATION_COMPLETED, 1000, token=99)
    )
    assert decision.action is Action.DISCARD_BATCH
    assert decision.token == 99


def test_mode_classification():
    cfg = SUGGEST
    state = initial_state(0)
    assert classify_mode(state, cfg, 0) is Mode.ACCELERATION  # idle not yet elapsed
    assert classify_mode(state, cfg, 5000) is Mode.EXPLORATION

    state, _ = on_event(state, cfg, ActivityEvent(EventKind.USER_TYPING, 6000))
    assert classify_mode(state, cfg, 7000) is Mode.ACCELERATION  # typing grace
    assert classify_mode(state, cfg, 11_000) is Mode.EXPLORATION

    state, _ = on_event(state, cfg, ActivityEvent(EventKind.RUN_COMPLETED, 12_000, is_error=True))
    assert classify_mode(state, cfg, 12_000) is Mode.DEBUGGING
    assert classify_mode(state, cfg, 60_000) is Mode.DEBUGGING  # until an edit or clean run

    state, _ = on_event(state, cfg, ActivityEvent(EventKind.USER_TYPING, 61_000))
    assert classify_mode(state, cfg, 61_000) is Mode.ACCELERATION


def test_typing_is_strictly_inside_grace():
    cfg = SUGGEST
    state = initial_state(0)
    state, _ = on_event(state, cfg, ActivityEvent(EventKind.USER_TYPING, 0))
    assert state.typing_active(cfg, 4999)
    assert not state.typing_active(cfg, 5000)  # boundary: grace over


def test_cooldown_boundary_inclusive():
    cfg = SUGGEST
    state = initial_state(0)
    state, _ = on_event(state, cfg, ActivityEvent(EventKind.SUGGESTION_INTERACTION, 1000))
    assert not state.cooldown_satisfied(cfg, 20_999)
    assert state.cooldown_satisfied(cfg, 21_000)


def test_fold_events_one_decision_per_event():
    events = [
        ActivityEvent(EventKind.USER_TYPING, 100),
        ActivityEvent(EventKind.CLOCK_TICK, 1000),
        ActivityEvent(EventKind.CLOCK_TICK, 5100),
    ]
    state, decisions = fold_events(SUGGEST, events)
    assert len(decisions) == 3
    assert decisions[0].action is Action.NONE
    assert decisions[1].action is Action.NONE
    assert decisions[2].action is Action.START_GENERATION
    assert state.pending is not None


def test_baseline_tick_never_starts():
    state = initial_state(0)
    for ts in range(1000, 200_000, 1000):
        state, decision = on_event(state, BASELINE, ActivityEvent(EventKind.CLOCK_TICK, ts))
        assert decision.action is Action.NONE
