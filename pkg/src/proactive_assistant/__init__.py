"""Self-hostable proactive programming assistant.

Watches a coding session, decides when to interject with suggestion
cards (idle detection, cooldowns, debug triggers), previews suggested
code as line diffs, and logs every interaction to a replayable
telemetry stream with analysis and experiment-scheduling tools on top.
"""

from .categories import CATEGORY_LABELS, DEBUG_CATEGORIES, SuggestionCategory, parse_category
from .conditions import (
    BASELINE,
    BUILTIN_CONDITIONS,
    PERSISTENT_SUGGEST,
    PROACTIVE_VARIANTS,
    SUGGEST,
    SUGGEST_PREVIEW,
    ConditionConfig,
    ConditionRegistry,
    custom_condition,
    load_condition_file,
)
from .diffing import DiffHunk, apply_hunks, compute_diff
from .errors import (
    AssistantError,
    BadStateError,
    ConfigurationError,
    ContractError,
    NotFoundError,
    ProviderError,
    RunnerUnavailableError,
    SessionReadOnlyError,
    StalePreviewError,
    TelemetryWriteError,
    UnsupportedInConditionError,
    ValidationError,
)
from .metrics import InteractionMetrics, MetricStat, compute_metrics
from .parsing import ParsedSuggestion, ParseOutcome, parse_suggestions
from .preview import PreviewResult, build_preview
from .prompts import PromptBundle, PromptSegment, build_chat_prompt, build_debug_prompt, build_standard_prompt
from .providers import EchoProvider, Provider, ProviderResponse, ScriptedProvider, provider_from_uri
from .replaying import DeterministicDriver, ReplayResult, logs_equivalent, replay_log
from .runner import CommandRunner, RawRunOutput, Runner, ScriptedRunner
from .runtime import PushFrame, SessionRuntime
from .scheduling import Assignment, ConditionBlock, assign_condition
from .session import ChatMessage, CodeDocument, RunResult, Session, Suggestion, SuggestionState
from .tasks import BUILTIN_TASKS, TaskFixture, TaskRegistry
from .telemetry import EVENT_KINDS, TelemetryEvent, TelemetryWriter, audit_log, read_log
from .timing import Action, ActivityEvent, Decision, EventKind, Mode, TimingState, initial_state, on_event

__version__ = "0.1.0"

__all__ = [
    "Action",
    "ActivityEvent",
    "AssistantError",
    "Assignment",
    "BASELINE",
    "BUILTIN_CONDITIONS",
    "BUILTIN_TASKS",
    "BadStateError",
    "CATEGORY_LABELS",
    "ChatMessage",
    "CodeDocument",
    "CommandRunner",
    "ConditionBlock",
    "ConditionConfig",
    "ConditionRegistry",
    "ConfigurationError",
    "ContractError",
    "DEBUG_CATEGORIES",
    "Decision",
    "DeterministicDriver",
    "DiffHunk",
    "EVENT_KINDS",
    "EchoProvider",
    "EventKind",
    "InteractionMetrics",
    "MetricStat",
    "Mode",
    "NotFoundError",
    "PERSISTENT_SUGGEST",
    "PROACTIVE_VARIANTS",
    "ParseOutcome",
    "ParsedSuggestion",
    "PreviewResult",
    "PromptBundle",
    "PromptSegment",
    "Provider",
    "ProviderError",
    "ProviderResponse",
    "PushFrame",
    "RawRunOutput",
    "ReplayResult",
    "RunResult",
    "Runner",
    "RunnerUnavailableError",
    "SUGGEST",
    "SUGGEST_PREVIEW",
    "ScriptedProvider",
    "ScriptedRunner",
    "Session",
    "SessionReadOnlyError",
    "SessionRuntime",
    "StalePreviewError",
    "Suggestion",
    "SuggestionCategory",
    "SuggestionState",
    "TaskFixture",
    "TaskRegistry",
    "TelemetryEvent",
    "TelemetryWriteError",
    "TelemetryWriter",
    "TimingState",
    "UnsupportedInConditionError",
    "ValidationError",
    "apply_hunks",
    "assign_condition",
    "audit_log",
    "build_chat_prompt",
    "build_debug_prompt",
    "build_preview",
    "build_standard_prompt",
    "compute_diff",
    "compute_metrics",
    "custom_condition",
    "initial_state",
    "load_condition_file",
    "logs_equivalent",
    "on_event",
    "parse_category",
    "parse_suggestions",
    "provider_from_uri",
    "read_log",
    "replay_log",
]
