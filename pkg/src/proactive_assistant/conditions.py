"""Experiment condition configuration.

A ``ConditionConfig`` bundles every tunable proactivity parameter. Four
built-in conditions mirror the study arms:

* ``baseline``           - plain chat, proactivity off
* ``suggest``            - proactive suggestions, no preview
* ``suggest_preview``    - proactive suggestions plus code-integration preview
* ``persistent_suggest`` - suggest variant with a 5 s cooldown, 5 suggestions
  per batch, and no guiding prompts

Custom conditions can be loaded from a key-value configuration file, see
``load_condition_file``.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Iterable

from .errors import ConfigurationError

DEFAULT_HISTORY_LIMIT = 40


@dataclass(frozen=True)
class ConditionConfig:
    """All tunable proactivity parameters for one experiment arm."""

    name: str
    proactive_enabled: bool
    preview_enabled: bool
    idle_threshold_s: float = 5.0
    cooldown_s: float = 20.0
    suggestions_per_batch: int = 3
    guiding_prompts: bool = True
    history_limit: int = DEFAULT_HISTORY_LIMIT
    # Grace period after the last keystroke before the user counts as
    # "not typing". Defaults to idle_threshold_s (both are 5 s in practice)
    # but stays independently configurable.
    typing_resume_grace_s: float | None = None

    def __post_init__(self) -> None:
        if not self.name:
            raise ConfigurationError("condition name must be non-empty")
        if self.idle_threshold_s <= 0:
            raise ConfigurationError("idle_threshold_s must be > 0")
        if self.cooldown_s < 0:
            raise ConfigurationError("cooldown_s must be >= 0")
        if not 1 <= self.suggestions_per_batch <= 10:
            raise ConfigurationError("suggestions_per_batch must be in 1..10")
        if self.history_limit < 1:
            raise ConfigurationError("history_limit must be >= 1")
        if self.preview_enabled and not self.proactive_enabled:
            raise ConfigurationError(
                "preview_enabled requires proactive_enabled (baseline has neither)"
            )
        if self.typing_resume_grace_s is not None and self.typing_resume_grace_s < 0:
            raise ConfigurationError("typing_resume_grace_s must be >= 0")

    @property
    def typing_grace_s(self) -> float:
        grace = self.typing_resume_grace_s
        return self.idle_threshold_s if grace is None else grace

    def to_payload(self) -> dict:
        return {
            "name": self.name,
            "proactive_enabled": self.proactive_enabled,
            "preview_enabled": self.preview_enabled,
            "idle_threshold_s": self.idle_threshold_s,
            "cooldown_s": self.cooldown_s,
            "suggestions_per_batch": self.suggestions_per_batch,
            "guiding_prompts": self.guiding_prompts,
            "history_limit": self.history_limit,
            "typing_resume_grace_s": self.typing_resume_grace_s,
        }

    @classmethod
    def from_payload(cls, data: dict) -> "ConditionConfig":
        return cls(
            name=data["name"],
            proactive_enabled=bool(data["proactive_enabled"]),
            preview_enabled=bool(data["preview_enabled"]),
            idle_threshold_s=float(data.get("idle_threshold_s", 5.0)),
            cooldown_s=float(data.get("cooldown_s", 20.0)),
            suggestions_per_batch=int(data.get("suggestions_per_batch", 3)),
            guiding_prompts=bool(data.get("guiding_prompts", True)),
            history_limit=int(data.get("history_limit", DEFAULT_HISTORY_LIMIT)),
            typing_resume_grace_s=data.get("typing_resume_grace_s"),
        )

    @property
    def idle_threshold_ms(self) -> int:
        return int(round(self.idle_threshold_s * 1000))

    @property
    def cooldown_ms(self) -> int:
        return int(round(self.cooldown_s * 1000))

    @property
    def typing_grace_ms(self) -> int:
        return int(round(self.typing_grace_s * 1000))


BASELINE = ConditionConfig(
    name="baseline",
    proactive_enabled=False,
    preview_enabled=False,
    idle_threshold_s=5.0,
    cooldown_s=20.0,
    suggestions_per_batch=3,
    guiding_prompts=True,
)

SUGGEST = ConditionConfig(
    name="suggest",
    proactive_enabled=True,
    preview_enabled=False,
    idle_threshold_s=5.0,
    cooldown_s=20.0,
    suggestions_per_batch=3,
    guiding_prompts=True,
)

SUGGEST_PREVIEW = ConditionConfig(
    name="suggest_preview",
    proactive_enabled=True,
    preview_enabled=True,
    idle_threshold_s=5.0,
    cooldown_s=20.0,
    suggestions_per_batch=3,
    guiding_prompts=True,
)

PERSISTENT_SUGGEST = ConditionConfig(
    name="persistent_suggest",
    proactive_enabled=True,
    preview_enabled=False,
    idle_threshold_s=5.0,
    cooldown_s=5.0,
    suggestions_per_batch=5,
    guiding_prompts=False,
)

BUILTIN_CONDITIONS: dict[str, ConditionConfig] = {
    cfg.name: cfg for cfg in (BASELINE, SUGGEST, SUGGEST_PREVIEW, PERSISTENT_SUGGEST)
}

# Proactive study arms, in assignment order (baseline is within-subjects).
PROACTIVE_VARIANTS = ("suggest_preview", "suggest", "persistent_suggest")


class ConditionRegistry:
    """Named lookup of condition configs; built-ins plus any loaded customs."""

    def __init__(self, extra: Iterable[ConditionConfig] = ()) -> None:
        self._configs = dict(BUILTIN_CONDITIONS)
        for cfg in extra:
            self.register(cfg)

    def register(self, cfg: ConditionConfig) -> None:
        self._configs[cfg.name] = cfg

    def get(self, name: str) -> ConditionConfig:
        try:
            return self._configs[name]
        except KeyError:
            known = ", ".join(sorted(self._configs))
            raise ConfigurationError(f"unknown condition {name!r} (known: {known})") from None

    def names(self) -> list[str]:
        return sorted(self._configs)


_FILE_KEYS = {
    "name",
    "proactive_enabled",
    "preview_enabled",
    "idle_threshold_s",
    "cooldown_s",
    "suggestions_per_batch",
    "guiding_prompts",
    "history_limit",
}

_BOOL_VALUES = {"true": True, "yes": True, "on": True, "1": True,
                "false": False, "no": False, "off": False, "0": False}


def _parse_bool(raw: str, key: str) -> bool:
    try:
        return _BOOL_VALUES[raw.strip().lower()]
    except KeyError:
        raise ConfigurationError(f"{key}: expected a boolean, got {raw!r}") from None


def _build_config(pairs: dict[str, str], fallback_name: str | None) -> ConditionConfig:
    unknown = set(pairs) - _FILE_KEYS
    if unknown:
        raise ConfigurationError(f"unknown condition keys: {sorted(unknown)}")
    name = pairs.get("name", fallback_name)
    if not name:
        raise ConfigurationError("condition file entry is missing a name")
    if "proactive_enabled" not in pairs:
        raise ConfigurationError(f"condition {name!r}: proactive_enabled is required")
    try:
        kwargs: dict = {
            "name": name,
            "proactive_enabled": _parse_bool(pairs["proactive_enabled"], "proactive_enabled"),
            "preview_enabled": _parse_bool(pairs.get("preview_enabled", "false"), "preview_enabled"),
        }
        if "idle_threshold_s" in pairs:
            kwargs["idle_threshold_s"] = float(pairs["idle_threshold_s"])
        if "cooldown_s" in pairs:
            kwargs["cooldown_s"] = float(pairs["cooldown_s"])
        if "suggestions_per_batch" in pairs:
            kwargs["suggestions_per_batch"] = int(pairs["suggestions_per_batch"])
        if "guiding_prompts" in pairs:
            kwargs["guiding_prompts"] = _parse_bool(pairs["guiding_prompts"], "guiding_prompts")
        if "history_limit" in pairs:
            kwargs["history_limit"] = int(pairs["history_limit"])
    except ValueError as exc:
        raise ConfigurationError(f"condition {name!r}: {exc}") from None
    return ConditionConfig(**kwargs)


def load_condition_file(path: str | Path) -> list[ConditionConfig]:
    """Parse a key-value condition file into configs.

    Format: one ``key = value`` pair per line, ``#`` comments. A flat file
    defines a single condition (the ``name`` key is then required). A file
    may also define several conditions using ``[section]`` headers, where
    the section name doubles as the condition name.
    """
    text = Path(path).read_text(encoding="utf-8")
    entries: list[tuple[str | None, dict[str, str]]] = [(None, {})]
    for lineno, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("[") and line.endswith("]"):
            entries.append((line[1:-1].strip(), {}))
            continue
        if "=" not in line:
            raise ConfigurationError(f"{path}:{lineno}: expected 'key = value', got {line!r}")
        key, _, value = line.partition("=")
        entries[-1][1][key.strip()] = value.strip()

    configs = []
    for section, pairs in entries:
        if not pairs:
            continue
        configs.append(_build_config(pairs, fallback_name=section))
    if not configs:
        raise ConfigurationError(f"{path}: no condition entries found")
    return configs


def custom_condition(base: str = "suggest", **overrides) -> ConditionConfig:
    """Derive a custom config from a built-in, overriding selected fields."""
    cfg = BUILTIN_CONDITIONS.get(base)
    if cfg is None:
        raise ConfigurationError(f"unknown base condition {base!r}")
    if "name" not in overrides:
        overrides["name"] = f"custom_{base}"
    return replace(cfg, **overrides)
