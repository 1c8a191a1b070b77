"""Human/bot classification over an answer attempt.

Five checks run in a fixed order and the first failure names the verdict
reason: answer digest match, no paste event, enough keydowns for the
answer, gap variability above the floor, and (for answers longer than
three characters) total typing time above the floor. Both timing checks
are strict inequalities, so a variance of exactly zero fails even with a
zero threshold.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass

from .challenge import hash_answer, normalize_answer
from .features import FeatureVector, KeystrokeTrace, compute_features

_HEX64 = re.compile(r"^[0-9a-f]{64}$")


@dataclass(frozen=True)
class Thresholds:
    """Decision thresholds; defaults are the evaluated operating point.

    min_len_for_total_check gates the total-time check: it only applies to
    answers whose normalized length exceeds this many characters. Service
    configs validate all values as >= 0; the dataclass itself accepts
    anything so analysis code can probe degenerate settings.
    """

    min_stddev_ms: float = 20.0
    min_total_ms: float = 150.0
    min_len_for_total_check: int = 3
    min_keystrokes: int = 1


class Reason(str, enum.Enum):
    OK = "ok"
    HASH_MISMATCH = "hash_mismatch"
    PASTE_DETECTED = "paste_detected"
    LOW_VARIANCE = "low_variance"
    TOO_FAST = "too_fast"
    TOO_FEW_KEYSTROKES = "too_few_keystrokes"


class Decision(str, enum.Enum):
    HUMAN = "human"
    BOT = "bot"


_EXPLANATIONS = {
    Reason.OK: "verified",
    Reason.HASH_MISMATCH: "Answer hash mismatch",
    Reason.PASTE_DETECTED: "Paste event detected",
    Reason.LOW_VARIANCE: "Low latency std. deviation",
    Reason.TOO_FAST: "Total typing time below threshold",
    Reason.TOO_FEW_KEYSTROKES: "Too few keystrokes for the answer",
}


@dataclass(frozen=True)
class Verdict:
    decision: Decision
    reason: Reason
    features: FeatureVector

    @property
    def is_human(self) -> bool:
        return self.decision is Decision.HUMAN


def classify(
    typed_text: str,
    trace: KeystrokeTrace,
    target_hash: str,
    thresholds: Thresholds = Thresholds(),
) -> Verdict:
    """Apply the ordered checks; human exactly when every one passes.

    Check order: hash -> paste -> keystroke count -> variance -> speed.
    Raises ValueError for a malformed target hash and propagates
    NonMonotonicTraceError from feature extraction so the caller can tell
    a malformed client apart from a detected bot.
    """
    if not _HEX64.match(target_hash):
        raise ValueError("target_hash must be 64 lowercase hex characters")

    features = compute_features(trace)
    normalized = normalize_answer(typed_text)

    def bot(reason: Reason) -> Verdict:
        return Verdict(decision=Decision.BOT, reason=reason, features=features)

    if hash_answer(normalized) != target_hash:
        return bot(Reason.HASH_MISMATCH)
    if trace.paste_flagged:
        return bot(Reason.PASTE_DETECTED)
    if features.keystroke_count < thresholds.min_keystrokes or (
        features.keystroke_count < len(normalized)
    ):
        return bot(Reason.TOO_FEW_KEYSTROKES)
    if not features.stddev_latency_ms > thresholds.min_stddev_ms:
        return bot(Reason.LOW_VARIANCE)
    if len(normalized) > thresholds.min_len_for_total_check and not (
        features.total_duration_ms > thresholds.min_total_ms
    ):
        return bot(Reason.TOO_FAST)
    return Verdict(decision=Decision.HUMAN, reason=Reason.OK, features=features)


def describe_reason(reason: Reason) -> str:
    """Stable one-line description of a reason code."""
    return _EXPLANATIONS[Reason(reason)]


def explain(verdict: Verdict) -> str:
    """Stable one-line description of a verdict's reason."""
    return describe_reason(verdict.reason)
