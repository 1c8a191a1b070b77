"""Challenge construction and the SHA-256 answer commitment.

A challenge carries the question and a digest of the normalized answer;
the plaintext answer is hashed at construction time and never stored.
Normalization (trim, collapse internal whitespace, lowercase) happens on
both sides of the protocol so honest capitalization or spacing differences
still verify.
"""

from __future__ import annotations

import enum
import hashlib
import secrets
import time
from dataclasses import dataclass, field

HEX_DIGEST_LEN = 64
DEFAULT_TTL_MS = 120_000.0


class Category(str, enum.Enum):
    COLORS = "colors"
    ARITHMETIC = "arithmetic"
    ANIMALS = "animals"
    COMMON_SENSE = "common_sense"


class EmptyAnswerError(ValueError):
    """Raised when an answer normalizes to the empty string."""


def normalize_answer(raw: str) -> str:
    """Trim, collapse whitespace runs to single spaces, and lowercase.

    Idempotent: applying it twice equals applying it once.
    """
    return " ".join(raw.casefold().split())


def hash_answer(normalized: str) -> str:
    """Lowercase hex SHA-256 over the UTF-8 bytes of the input."""
    return hashlib.sha256(normalized.encode("utf-8")).hexdigest()


def new_challenge_id() -> str:
    """Random 128-bit hex token; opaque, leaks no issue order."""
    return secrets.token_hex(16)


def now_ms() -> float:
    """Wall-clock epoch time in milliseconds."""
    return time.time() * 1000.0


@dataclass(frozen=True)
class AnswerKey:
    """A normalized answer together with its digest."""

    plaintext: str
    hash: str

    @classmethod
    def from_raw(cls, raw: str) -> "AnswerKey":
        normalized = normalize_answer(raw)
        if not normalized:
            raise EmptyAnswerError("answer is empty after normalization")
        return cls(plaintext=normalized, hash=hash_answer(normalized))


@dataclass
class Challenge:
    """A one-time question with a server-held answer digest.

    Immutable after construction except for `consumed`, which the session
    store flips false -> true exactly once under its own lock.
    """

    id: str
    question: str
    answer_hash: str
    category: Category
    issued_at_ms: float
    ttl_ms: float
    consumed: bool = field(default=False)

    @property
    def expires_at_ms(self) -> float:
        return self.issued_at_ms + self.ttl_ms

    def is_expired(self, now: float) -> bool:
        # Strict: a challenge at exactly issued_at + ttl is still live.
        return self.expires_at_ms < now


def make_challenge(
    question: str,
    answer: str,
    category: Category,
    ttl_ms: float = DEFAULT_TTL_MS,
    issued_at_ms: float | None = None,
) -> Challenge:
    """Build a fresh challenge, hashing and discarding the plaintext answer.

    Raises EmptyAnswerError if the answer normalizes to nothing, and
    ValueError for a blank question.
    """
    if not question.strip():
        raise ValueError("question must be non-empty")
    key = AnswerKey.from_raw(answer)
    return Challenge(
        id=new_challenge_id(),
        question=question,
        answer_hash=key.hash,
        category=Category(category),
        issued_at_ms=now_ms() if issued_at_ms is None else issued_at_ms,
        ttl_ms=ttl_ms,
    )
