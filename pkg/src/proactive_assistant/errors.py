"""Exception hierarchy shared by all subsystems.

Every error that can cross the HTTP boundary maps to exactly one
``ApiError`` code (see ``gateway.to_api_error``).
"""

from __future__ import annotations


class AssistantError(Exception):
    """Base class for all errors raised by this package."""


class NotFoundError(AssistantError):
    """A referenced entity (session, document, suggestion, preview) does not exist."""


class BadStateError(AssistantError):
    """The operation is not legal in the entity's current lifecycle state."""


class StalePreviewError(AssistantError):
    """The document changed since the preview was computed; re-preview required."""


class UnsupportedInConditionError(AssistantError):
    """The operation is disabled by the session's experiment condition."""


class ConfigurationError(AssistantError):
    """Invalid or unknown configuration (condition names, registry contents, ...)."""


class ValidationError(AssistantError):
    """A request or argument failed validation (empty chat message, bad payload, ...)."""


class ContractError(AssistantError):
    """An internal calling contract was violated (out-of-order timestamps, wrong kind)."""


class ProviderError(AssistantError):
    """The model provider failed or returned an unusable response."""


class RunnerUnavailableError(AssistantError):
    """No code-runner adapter is configured for this server."""


class SessionReadOnlyError(AssistantError):
    """The session entered the read-only error state (telemetry write failed)."""


class TelemetryWriteError(AssistantError):
    """Appending to the telemetry log failed; the owning session must go read-only."""
