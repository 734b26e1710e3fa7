"""The closed set of suggestion categories and their display labels."""

from __future__ import annotations

import enum


class SuggestionCategory(enum.Enum):
    EXPLAIN_CODE = "explain_code"
    BRAINSTORM_FUNCTIONALITY = "brainstorm_functionality"
    COMPLETE_CODE = "complete_code"
    DOCUMENTATION_POINTER = "documentation_pointer"
    DEBUG_LATENT = "debug_latent"
    DEBUG_RUNTIME = "debug_runtime"
    ADD_TESTS = "add_tests"
    IMPROVE_EFFICIENCY = "improve_efficiency"

    @property
    def label(self) -> str:
        return CATEGORY_LABELS[self]


CATEGORY_LABELS: dict[SuggestionCategory, str] = {
    SuggestionCategory.EXPLAIN_CODE: "Explaining existing code",
    SuggestionCategory.BRAINSTORM_FUNCTIONALITY: "Brainstorming new functionality",
    SuggestionCategory.COMPLETE_CODE: "Completing unfinished code",
    SuggestionCategory.DOCUMENTATION_POINTER: "Pointers to documentation",
    SuggestionCategory.DEBUG_LATENT: "Debugging (Latent errors)",
    SuggestionCategory.DEBUG_RUNTIME: "Debugging (Runtime errors)",
    SuggestionCategory.ADD_TESTS: "Adding unit tests",
    SuggestionCategory.IMPROVE_EFFICIENCY: "Improving efficiency and modularity",
}

# Categories a debugging batch may use; everything else is filtered out.
DEBUG_CATEGORIES = (
    SuggestionCategory.DEBUG_RUNTIME,
    SuggestionCategory.DEBUG_LATENT,
    SuggestionCategory.EXPLAIN_CODE,
)


def _normalize(text: str) -> str:
    return "".join(ch for ch in text.lower() if ch.isalnum())


_LOOKUP: dict[str, SuggestionCategory] = {}
for _cat in SuggestionCategory:
    _LOOKUP[_normalize(_cat.value)] = _cat
    _LOOKUP[_normalize(_cat.label)] = _cat
# Tolerated shorthand the model occasionally produces.
_LOOKUP[_normalize("debugging latent errors")] = SuggestionCategory.DEBUG_LATENT
_LOOKUP[_normalize("debugging runtime errors")] = SuggestionCategory.DEBUG_RUNTIME
_LOOKUP[_normalize("explain code")] = SuggestionCategory.EXPLAIN_CODE
_LOOKUP[_normalize("brainstorming new ideas or functionality")] = (
    SuggestionCategory.BRAINSTORM_FUNCTIONALITY
)


def parse_category(raw: str) -> SuggestionCategory | None:
    """Map free-form category text to the closed set; None when unknown."""
    if not isinstance(raw, str):
        return None
    return _LOOKUP.get(_normalize(raw))
