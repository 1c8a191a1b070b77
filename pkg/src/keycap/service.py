"""Verification service: issue one-time challenges, judge submissions.

The response protocol keeps everything coarse on purpose: clients see the
question, the answer digest (needed for the live hash display), and later
a decision plus a reason code. Feature values and per-check numbers stay
server-side so adversaries get no gradient to climb. A wrong answer earns
one in-place retry (typos are the honest failure mode); any behavioral
failure burns the challenge so bots cannot probe thresholds on a fixed
question.
"""

from __future__ import annotations

import logging
import random
from dataclasses import dataclass
from typing import Protocol

from .challenge import Category, Challenge
from .classify import Reason, Thresholds, classify
from .features import KeystrokeTrace, NonMonotonicTraceError
from .store import ChallengeStore

logger = logging.getLogger("keycap.service")

# Total verification attempts per challenge while failures are hash
# mismatches: the first mismatch leaves the challenge usable once more.
MAX_ATTEMPTS = 2


class ChallengeSource(Protocol):
    def fetch_challenge(self, category: Category, seed: int) -> Challenge: ...


@dataclass(frozen=True)
class VerifyResponse:
    decision: str  # "human" | "bot" | "error"
    reason: str
    retry_allowed: bool

    def to_dict(self) -> dict:
        return {
            "decision": self.decision,
            "reason": self.reason,
            "retry_allowed": self.retry_allowed,
        }


class CaptchaService:
    """Glue between a challenge source, the one-time store, and the classifier."""

    def __init__(
        self,
        source: ChallengeSource,
        store: ChallengeStore | None = None,
        thresholds: Thresholds = Thresholds(),
        rng: random.Random | None = None,
    ):
        self.source = source
        self.store = store or ChallengeStore()
        self.thresholds = thresholds
        self._rng = rng or random.Random()

    def issue_challenge(self, category: str | None = None) -> dict:
        """Create, store, and expose a fresh challenge.

        The response carries the id, question, answer digest, and expiry:
        nothing else, and never the plaintext answer. Raises ValueError
        for an unknown category and StoreFullError when at capacity.
        """
        cat = Category(category) if category else self._rng.choice(list(Category))
        seed = self._rng.getrandbits(32)
        challenge = self.source.fetch_challenge(cat, seed)
        self.store.put(challenge)
        return {
            "id": challenge.id,
            "question": challenge.question,
            "answer_hash": challenge.answer_hash,
            "expires_at": challenge.expires_at_ms,
        }

    def verify(
        self, challenge_id: str, typed_text: str, trace: KeystrokeTrace
    ) -> VerifyResponse:
        """Judge one submission; at most one human verdict per challenge.

        Unknown and expired ids are indistinguishable (unknown_challenge).
        The whole check-classify-consume sequence runs inside the store
        lock, which is what makes consumption exactly-once under
        concurrent verifies on the same id.
        """
        with self.store.transaction():
            entry = self.store.get(challenge_id)
            if entry is None:
                return VerifyResponse("error", "unknown_challenge", False)
            challenge = entry.challenge
            if challenge.consumed:
                return VerifyResponse("error", "already_used", False)
            try:
                verdict = classify(
                    typed_text, trace, challenge.answer_hash, self.thresholds
                )
            except NonMonotonicTraceError:
                # Malformed client, not a classified bot; burn the
                # challenge either way.
                logger.warning("non-monotonic trace for challenge %s", challenge_id)
                challenge.consumed = True
                return VerifyResponse("error", "invalid_trace", False)
            if verdict.is_human:
                challenge.consumed = True
                return VerifyResponse("human", Reason.OK.value, False)
            if verdict.reason is Reason.HASH_MISMATCH:
                entry.attempts += 1
                if entry.attempts < MAX_ATTEMPTS:
                    return VerifyResponse("bot", verdict.reason.value, True)
                challenge.consumed = True
                return VerifyResponse("bot", verdict.reason.value, False)
            challenge.consumed = True
            return VerifyResponse("bot", verdict.reason.value, False)

    def purge_expired(self, now: float | None = None) -> int:
        return self.store.purge_expired(now)
