"""Parser behavior pinned by a fixture corpus plus generated fuzz."""

import json
import random
import string
from pathlib import Path

import pytest

from proactive_assistant.categories import CATEGORY_LABELS, SuggestionCategory
from proactive_assistant.parsing import (
    MAX_EXPLANATION_BULLETS,
    ParseOutcome,
    extract_single_code_block,
    parse_suggestions,
)

CORPUS_DIR = Path(__file__).parent / "fixtures" / "parser_corpus"

_LABELS = list(CATEGORY_LABELS.values())


def load_corpus() -> list[tuple[str, dict]]:
    cases = []
    for path in sorted(CORPUS_DIR.glob("*.json")):
        with path.open(encoding="utf-8") as fh:
            cases.append((path.stem, json.load(fh)))
    return cases


CORPUS = load_corpus()


def check_fixture(fixture: dict) -> None:
    outcome = parse_suggestions(fixture["raw_text"], fixture["max_n"])
    got = [
        {
            "category": s.category.value,
            "summary": s.summary,
            "code": s.code,
            "explanation": list(s.explanation),
        }
        for s in outcome.suggestions
    ]
    assert got == fixture["expected"]
    assert outcome.ok is fixture["ok"]
    assert outcome.warnings == fixture["warnings"]


def fuzz_text(rng: random.Random) -> str:
    """One adversarial provider response: JSON-ish, list-ish, or junk."""
    pieces = []
    for _ in range(rng.randint(1, 12)):
        roll = rng.randrange(10)
        if roll == 0:
            entry = {
                "type": rng.choice(_LABELS + ["bogus", 3, None]),
                "summary": rng.choice(["do the thing", "", None, 7]),
            }
            if rng.random() < 0.5:
                entry["code"] = rng.choice(["x = 1\n", 99, ["a"], ""])
            if rng.random() < 0.5:
                entry["explanation"] = rng.choice([["a", "b"], "solo", [1, 2], []])
            pieces.append(json.dumps([entry] * rng.randint(1, 4)))
        elif roll == 1:
            body = "".join(rng.choice('{}[],:"abc \n') for _ in range(rng.randint(0, 80)))
            pieces.append(f"```json\n{body}\n```")
        elif roll == 2:
            tail = "".join(rng.choice(string.printable) for _ in range(rng.randint(0, 40)))
            pieces.append(f"{rng.randint(0, 999)}. {rng.choice(_LABELS)}: {tail}")
        elif roll == 3:
            tail = "".join(rng.choice(string.printable) for _ in range(rng.randint(0, 30)))
            pieces.append(f"- {tail}")
        elif roll == 4:
            pieces.append("".join(chr(rng.randint(1, 0x10FFFF)) for _ in range(rng.randint(0, 40))))
        elif roll == 5:
            pieces.append("[" * rng.randint(1, 60) + "]" * rng.randint(0, 60))
        elif roll == 6:
            pieces.append("```" + "`" * rng.randint(0, 5))
        elif roll == 7:
            pieces.append(rng.choice(["", " ", "\n", "\t", "\x00", "\r\n"]) * rng.randint(1, 10))
        elif roll == 8:
            blob = rng.choice([None, True, 3.5, "plain", [[[[1]]]], {"a": {"b": []}}])
            pieces.append(json.dumps(blob))
        else:
            pieces.append("".join(rng.choice(string.printable) for _ in range(rng.randint(0, 60))))
    return rng.choice(["", "Sure! "]) + rng.choice(["\n", " "]).join(pieces)


def run_parser_fuzz(count: int, seed: int = 20260815) -> int:
    """Feed ``count`` generated texts through the parser; assert totality."""
    rng = random.Random(seed)
    for _ in range(count):
        text = fuzz_text(rng)
        max_n = rng.randint(1, 8)
        outcome = parse_suggestions(text, max_n)
        assert isinstance(outcome, ParseOutcome)
        assert len(outcome.suggestions) <= max_n
        assert outcome.warnings >= 0
        for s in outcome.suggestions:
            assert isinstance(s.category, SuggestionCategory)
            assert isinstance(s.summary, str) and s.summary.strip()
            assert s.code is None or isinstance(s.code, str)
            assert isinstance(s.explanation, tuple)
            assert len(s.explanation) <= MAX_EXPLANATION_BULLETS
            assert all(isinstance(b, str) for b in s.explanation)
    return count


@pytest.mark.parametrize("name,fixture", CORPUS, ids=[name for name, _ in CORPUS])
def test_corpus_fixture(name, fixture):
    check_fixture(fixture)


def test_corpus_is_large_enough():
    assert len(CORPUS) >= 20
    assert len({name for name, _ in CORPUS}) == len(CORPUS)


def test_max_n_must_be_positive():
    with pytest.raises(ValueError):
        parse_suggestions("anything", 0)


def test_fuzz_smoke():
    assert run_parser_fuzz(500) == 500


def test_non_string_input_is_empty_outcome():
    outcome = parse_suggestions(None, 3)  # type: ignore[arg-type]
    assert not outcome.ok
    assert outcome.suggestions == []


def test_extract_single_code_block():
    assert extract_single_code_block("```python\nx = 1\n```") == "x = 1\n"
    assert extract_single_code_block("no fences here") is None
    assert extract_single_code_block(None) is None
    two = "```\nfirst\n```\ntext\n```\nsecond\n```"
    assert extract_single_code_block(two) == "first\n"
