"""Offline template bank: deterministic (question, answer) generation.

Used as the standalone challenge source and as the fallback when the
external model provider misbehaves. Bank records come in two shapes:

  static     {"category": "colors", "question": "...", "answer": "orange"}
  computed   {"category": "arithmetic", "question": "What is {a} plus {b}?",
              "op": "add", "lo": 2, "hi": 9}

Computed records substitute seeded operands into the question and derive
the answer (always in digit form) from the named operation. The same
(seed, category) pair always yields the same output.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from pathlib import Path

from .challenge import Category, normalize_answer


class UnknownCategoryError(ValueError):
    """Raised for a category the bank has no templates for."""


class BankFormatError(ValueError):
    """Raised when a bank file record is malformed."""


_OPS = {
    "add": lambda a, b: a + b,
    "mul": lambda a, b: a * b,
}

MIN_TEMPLATES_PER_CATEGORY = 5


@dataclass(frozen=True)
class Template:
    category: Category
    question: str
    answer: str | None = None  # static answer, already in normalized form
    op: str | None = None  # computed: "add" or "mul"
    lo: int = 2
    hi: int = 9

    def realize(self, rng: random.Random) -> tuple[str, str]:
        """Produce a concrete (question, answer) pair."""
        if self.op is None:
            assert self.answer is not None
            return self.question, self.answer
        a = rng.randint(self.lo, self.hi)
        b = rng.randint(self.lo, self.hi)
        return self.question.format(a=a, b=b), str(_OPS[self.op](a, b))


# Authoring rules for the default bank: answers are single lowercase words
# or digit strings; word answers are >= 4 chars so the variance check has
# gaps to work with; and no question anywhere in the bank contains any
# word answer, so response bodies can be scanned for leaks without false
# positives (tests/test_templates.py enforces all of this).
_DEFAULT_RECORDS: list[dict] = [
    # colors
    {"category": "colors", "question": "What color is fresh grass in summer?", "answer": "green"},
    {"category": "colors", "question": "What color is a ripe banana?", "answer": "yellow"},
    {"category": "colors", "question": "What color is the night sky?", "answer": "black"},
    {"category": "colors", "question": "What color is the outside of an eggplant?", "answer": "purple"},
    {"category": "colors", "question": "What color is freshly fallen snow?", "answer": "white"},
    {"category": "colors", "question": "What color is a carrot?", "answer": "orange"},
    # arithmetic (answers computed, digit form)
    {"category": "arithmetic", "question": "What is {a} plus {b}?", "op": "add"},
    {"category": "arithmetic", "question": "Add {a} and {b}. What do you get?", "op": "add"},
    {"category": "arithmetic", "question": "What is the sum of {a} and {b}?", "op": "add"},
    {"category": "arithmetic", "question": "What is {a} times {b}?", "op": "mul"},
    {"category": "arithmetic", "question": "Multiply {a} by {b}. What is the result?", "op": "mul"},
    {"category": "arithmetic", "question": "What is {a} multiplied by {b}?", "op": "mul"},
    # animals
    {"category": "animals", "question": "Which animal has a very long neck and eats leaves from tall trees?", "answer": "giraffe"},
    {"category": "animals", "question": "Which large gray animal has a trunk?", "answer": "elephant"},
    {"category": "animals", "question": "Which flightless bird waddles across the ice?", "answer": "penguin"},
    {"category": "animals", "question": "Which hopping animal carries its baby in a pouch?", "answer": "kangaroo"},
    {"category": "animals", "question": "Which big cat has striped fur?", "answer": "tiger"},
    {"category": "animals", "question": "Which farm animal gives us wool?", "answer": "sheep"},
    # common sense
    {"category": "common_sense", "question": "What color is the sky on a clear day?", "answer": "blue"},
    {"category": "common_sense", "question": "What season comes after winter?", "answer": "spring"},
    {"category": "common_sense", "question": "What do bees make from flower nectar?", "answer": "honey"},
    {"category": "common_sense", "question": "Which meal do most people eat in the morning?", "answer": "breakfast"},
    {"category": "common_sense", "question": "Which drink do people brew from roasted beans?", "answer": "coffee"},
    {"category": "common_sense", "question": "Which room of the house do people usually cook in?", "answer": "kitchen"},
]


def _parse_record(raw: dict) -> Template:
    try:
        category = Category(raw["category"])
        question = raw["question"]
    except (KeyError, ValueError) as exc:
        raise BankFormatError(f"bad template record {raw!r}: {exc}") from exc
    if not isinstance(question, str) or not question.strip():
        raise BankFormatError(f"template question must be non-empty text: {raw!r}")
    if "op" in raw:
        if raw["op"] not in _OPS:
            raise BankFormatError(f"unknown answer rule {raw['op']!r}")
        return Template(
            category=category,
            question=question,
            op=raw["op"],
            lo=int(raw.get("lo", 2)),
            hi=int(raw.get("hi", 9)),
        )
    answer = raw.get("answer")
    if not isinstance(answer, str) or not normalize_answer(answer):
        raise BankFormatError(f"template needs an 'answer' or an 'op': {raw!r}")
    return Template(category=category, question=question, answer=normalize_answer(answer))


class TemplateBank:
    """An in-memory set of templates, grouped by category."""

    def __init__(self, templates: list[Template]):
        self._by_category: dict[Category, list[Template]] = {}
        for t in templates:
            self._by_category.setdefault(t.category, []).append(t)

    @classmethod
    def default(cls) -> "TemplateBank":
        return cls([_parse_record(r) for r in _DEFAULT_RECORDS])

    @classmethod
    def load(cls, path: str | Path) -> "TemplateBank":
        """Load a bank from a JSON file holding a list of records."""
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
        if not isinstance(raw, list):
            raise BankFormatError("bank file must hold a JSON list of records")
        return cls([_parse_record(r) for r in raw])

    def templates_for(self, category: Category) -> list[Template]:
        try:
            category = Category(category)
        except ValueError as exc:
            raise UnknownCategoryError(str(category)) from exc
        templates = self._by_category.get(category)
        if not templates:
            raise UnknownCategoryError(category.value)
        return templates

    def categories(self) -> list[Category]:
        return list(self._by_category)

    def static_answers(self) -> set[str]:
        """All literal answers in the bank (computed answers excluded)."""
        return {
            t.answer
            for ts in self._by_category.values()
            for t in ts
            if t.answer is not None
        }

    def generate(self, seed: int, category: Category) -> tuple[str, str]:
        """Deterministic (question, answer) for the given seed and category."""
        templates = self.templates_for(category)
        # String seeding is stable across processes, unlike hash().
        rng = random.Random(f"{seed}:{Category(category).value}")
        template = rng.choice(templates)
        return template.realize(rng)


_default_bank: TemplateBank | None = None


def default_bank() -> TemplateBank:
    global _default_bank
    if _default_bank is None:
        _default_bank = TemplateBank.default()
    return _default_bank


def template_generate(
    seed: int, category: Category, bank: TemplateBank | None = None
) -> tuple[str, str]:
    """Module-level convenience over the default bank."""
    return (bank or default_bank()).generate(seed, category)
