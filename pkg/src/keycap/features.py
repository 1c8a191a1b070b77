"""Keystroke timing feature extraction.

A submission's typing rhythm is summarized by three statistics over the
inter-key gaps (flight times): total duration from first to last keydown,
mean gap, and population standard deviation of the gaps. Degenerate traces
(zero or one keydown) yield all-zero features; rejecting them is the
classifier's job, not ours.
"""

from __future__ import annotations

import statistics
from dataclasses import dataclass, field


class NonMonotonicTraceError(ValueError):
    """Raised when keydown timestamps go backwards in time."""


@dataclass
class KeystrokeTrace:
    """One answer attempt's raw behavioral capture.

    timestamps are keydown times in milliseconds on a client-monotonic
    clock, origin-relative. Equal adjacent timestamps are legal (two keys
    within clock resolution); negative gaps are not.
    """

    timestamps: list[float] = field(default_factory=list)
    paste_flagged: bool = False
    typed_text: str = ""

    def to_dict(self) -> dict:
        return {
            "timestamps": list(self.timestamps),
            "paste_flagged": self.paste_flagged,
            "typed_text": self.typed_text,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "KeystrokeTrace":
        """Parse the wire/file form of a trace.

        Raises ValueError on structural problems so callers can map them
        to a bad-request response.
        """
        if not isinstance(data, dict):
            raise ValueError("trace must be an object")
        timestamps = data.get("timestamps")
        if not isinstance(timestamps, list) or not all(
            isinstance(t, (int, float)) and not isinstance(t, bool) for t in timestamps
        ):
            raise ValueError("trace.timestamps must be a list of numbers")
        paste_flagged = data.get("paste_flagged", False)
        if not isinstance(paste_flagged, bool):
            raise ValueError("trace.paste_flagged must be a boolean")
        typed_text = data.get("typed_text", "")
        if not isinstance(typed_text, str):
            raise ValueError("trace.typed_text must be a string")
        return cls(
            timestamps=[float(t) for t in timestamps],
            paste_flagged=paste_flagged,
            typed_text=typed_text,
        )


@dataclass(frozen=True)
class FeatureVector:
    """Summary statistics for one trace. All times in milliseconds."""

    total_duration_ms: float
    mean_latency_ms: float
    stddev_latency_ms: float
    keystroke_count: int
    flight_count: int

    def to_dict(self) -> dict:
        return {
            "total_duration_ms": self.total_duration_ms,
            "mean_latency_ms": self.mean_latency_ms,
            "stddev_latency_ms": self.stddev_latency_ms,
            "keystroke_count": self.keystroke_count,
            "flight_count": self.flight_count,
        }


def flight_times(timestamps: list[float]) -> list[float]:
    """Gaps between consecutive keydowns; length max(n-1, 0).

    Raises NonMonotonicTraceError if any gap is negative.
    """
    gaps = []
    for i in range(len(timestamps) - 1):
        gap = timestamps[i + 1] - timestamps[i]
        if gap < 0:
            raise NonMonotonicTraceError(
                f"timestamp {timestamps[i + 1]} precedes {timestamps[i]} at index {i + 1}"
            )
        gaps.append(gap)
    return gaps


def compute_features(trace: KeystrokeTrace) -> FeatureVector:
    """Extract the three timing statistics from a trace.

    Conventions: total duration is last minus first keydown (0 when fewer
    than two keydowns); mean gap is 0 for an empty gap list; stddev is the
    population standard deviation (0 for one or zero gaps).
    """
    ts = trace.timestamps
    gaps = flight_times(ts)
    n = len(ts)
    total = ts[-1] - ts[0] if n > 1 else 0.0
    mean = statistics.fmean(gaps) if gaps else 0.0
    stddev = statistics.pstdev(gaps) if len(gaps) > 1 else 0.0
    return FeatureVector(
        total_duration_ms=float(total),
        mean_latency_ms=float(mean),
        stddev_latency_ms=float(stddev),
        keystroke_count=n,
        flight_count=len(gaps),
    )
