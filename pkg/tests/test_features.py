"""Timing feature extraction: worked examples, properties, oracle equivalence."""

import math
import random
import time

import pytest
from hypothesis import given, strategies as st

from keycap.features import (
    FeatureVector,
    KeystrokeTrace,
    NonMonotonicTraceError,
    compute_features,
    flight_times,
)


def naive_features(timestamps):
    """Independent two-pass reference implementation (kept dumb on purpose)."""
    gaps = []
    for i in range(len(timestamps) - 1):
        gaps.append(timestamps[i + 1] - timestamps[i])
    total = timestamps[-1] - timestamps[0] if len(timestamps) > 1 else 0.0
    if gaps:
        mean = math.fsum(gaps) / len(gaps)
    else:
        mean = 0.0
    if len(gaps) > 1:
        variance = math.fsum((g - mean) ** 2 for g in gaps) / len(gaps)
        stddev = math.sqrt(variance)
    else:
        stddev = 0.0
    return total, mean, stddev


class TestFlightTimes:
    def test_fixed_50ms_shape(self):
        assert flight_times([0, 50, 100, 150]) == [50, 50, 50]

    def test_single_keystroke_has_no_flights(self):
        assert flight_times([100]) == []

    def test_empty(self):
        assert flight_times([]) == []

    def test_direct_differences(self):
        assert flight_times([0, 120, 300, 310]) == [120, 180, 10]

    def test_equal_adjacent_timestamps_allowed(self):
        assert flight_times([5, 5, 30]) == [0, 25]

    def test_negative_gap_rejected(self):
        with pytest.raises(NonMonotonicTraceError):
            flight_times([0, 50, 40])


class TestComputeFeatures:
    def test_uniform_50ms(self):
        fv = compute_features(KeystrokeTrace(timestamps=[0, 50, 100, 150, 200]))
        assert fv == FeatureVector(
            total_duration_ms=200.0,
            mean_latency_ms=50.0,
            stddev_latency_ms=0.0,
            keystroke_count=5,
            flight_count=4,
        )

    def test_empty_trace_is_all_zero(self):
        fv = compute_features(KeystrokeTrace(timestamps=[]))
        assert fv == FeatureVector(0.0, 0.0, 0.0, 0, 0)

    def test_singleton_trace_is_all_zero_counts_one(self):
        fv = compute_features(KeystrokeTrace(timestamps=[123.4]))
        assert fv == FeatureVector(0.0, 0.0, 0.0, 1, 0)

    def test_population_stddev(self):
        # gaps {100, 200}: mean 150, population stddev 50
        fv = compute_features(KeystrokeTrace(timestamps=[0, 100, 300]))
        assert fv.total_duration_ms == 300.0
        assert fv.mean_latency_ms == 150.0
        assert fv.stddev_latency_ms == 50.0

    def test_non_monotonic_propagates(self):
        with pytest.raises(NonMonotonicTraceError):
            compute_features(KeystrokeTrace(timestamps=[10, 0]))


# Exactness properties are stated over integer-valued inputs, where float64
# subtraction is exact; fractional clocks get the oracle-equivalence
# tolerance instead.
integer_traces = st.lists(
    st.integers(min_value=0, max_value=10**9), min_size=0, max_size=40
).map(lambda deltas: [float(s) for s in _cumsum(deltas)])


def _cumsum(deltas):
    total, out = 0, []
    for d in deltas:
        total += d
        out.append(total)
    return out


class TestProperties:
    @given(trace=integer_traces, shift=st.integers(min_value=0, max_value=10**12))
    def test_shift_invariance_exact(self, trace, shift):
        base = compute_features(KeystrokeTrace(timestamps=trace))
        shifted = compute_features(
            KeystrokeTrace(timestamps=[t + shift for t in trace])
        )
        assert shifted == base

    @given(
        gap=st.integers(min_value=0, max_value=2000),
        count=st.integers(min_value=2, max_value=40),
    )
    def test_constant_delay_law(self, gap, count):
        trace = KeystrokeTrace(timestamps=[float(i * gap) for i in range(count)])
        fv = compute_features(trace)
        assert fv.stddev_latency_ms == 0.0
        assert fv.mean_latency_ms == float(gap)

    @given(
        gaps=st.lists(
            st.floats(min_value=0.0, max_value=500.0, allow_nan=False), max_size=40
        )
    )
    def test_total_duration_matches_flight_sum(self, gaps):
        timestamps, t = [], 0.0
        for g in [0.0, *gaps]:
            t += g
            timestamps.append(t)
        fv = compute_features(KeystrokeTrace(timestamps=timestamps))
        assert math.isclose(
            fv.total_duration_ms,
            math.fsum(flight_times(timestamps)),
            rel_tol=1e-9,
            abs_tol=1e-9,
        )


def test_oracle_equivalence_1000_random_traces():
    """Implementation agrees with the naive reference to 1e-9 relative."""
    rng = random.Random(1729)
    start = time.perf_counter()
    for _ in range(1000):
        n = rng.randint(2, 40)
        timestamps, t = [], rng.uniform(0, 1000)
        for _ in range(n):
            timestamps.append(t)
            t += rng.uniform(0, 500)
        fv = compute_features(KeystrokeTrace(timestamps=timestamps))
        total, mean, stddev = naive_features(timestamps)
        assert math.isclose(fv.total_duration_ms, total, rel_tol=1e-9, abs_tol=1e-12)
        assert math.isclose(fv.mean_latency_ms, mean, rel_tol=1e-9, abs_tol=1e-12)
        assert math.isclose(fv.stddev_latency_ms, stddev, rel_tol=1e-9, abs_tol=1e-12)
        assert fv.keystroke_count == n
        assert fv.flight_count == n - 1
    assert time.perf_counter() - start < 1.0


class TestTraceSerialization:
    def test_round_trip(self):
        trace = KeystrokeTrace(
            timestamps=[0.0, 80.5, 200.0], paste_flagged=True, typed_text="cat"
        )
        assert KeystrokeTrace.from_dict(trace.to_dict()) == trace

    def test_typed_text_optional_on_the_wire(self):
        trace = KeystrokeTrace.from_dict({"timestamps": [0, 10], "paste_flagged": False})
        assert trace.typed_text == ""

    @pytest.mark.parametrize(
        "payload",
        [
            None,
            [],
            {"timestamps": "nope"},
            {"timestamps": [0, "x"]},
            {"timestamps": [0, True]},
            {"timestamps": [0], "paste_flagged": "yes"},
            {"timestamps": [0], "typed_text": 5},
        ],
    )
    def test_malformed_payloads_rejected(self, payload):
        with pytest.raises(ValueError):
            KeystrokeTrace.from_dict(payload)
