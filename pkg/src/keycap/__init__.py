"""keycap: hybrid CAPTCHA combining generated questions, an answer-hash
commitment, and keystroke-dynamics bot detection."""

from .challenge import (
    AnswerKey,
    Category,
    Challenge,
    EmptyAnswerError,
    hash_answer,
    make_challenge,
    normalize_answer,
)
from .classify import (
    Decision,
    Reason,
    Thresholds,
    Verdict,
    classify,
    describe_reason,
    explain,
)
from .features import (
    FeatureVector,
    KeystrokeTrace,
    NonMonotonicTraceError,
    compute_features,
    flight_times,
)
from .templates import TemplateBank, UnknownCategoryError, template_generate

__all__ = [
    "AnswerKey",
    "Category",
    "Challenge",
    "Decision",
    "EmptyAnswerError",
    "FeatureVector",
    "KeystrokeTrace",
    "NonMonotonicTraceError",
    "Reason",
    "TemplateBank",
    "Thresholds",
    "UnknownCategoryError",
    "Verdict",
    "classify",
    "compute_features",
    "describe_reason",
    "explain",
    "flight_times",
    "hash_answer",
    "make_challenge",
    "normalize_answer",
    "template_generate",
]

__version__ = "0.1.0"
