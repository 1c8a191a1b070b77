"""Service flows: issue, verify, retry semantics, exactly-once consumption."""

import random
import threading
from concurrent.futures import ThreadPoolExecutor

import pytest

from keycap.classify import Thresholds
from keycap.features import KeystrokeTrace
from keycap.harness import synthesize_human_trace
from keycap.provider import TemplateChallengeSource, LlmChallengeSource, ProviderConfig
from keycap.service import CaptchaService
from keycap.store import ChallengeStore
from keycap.templates import default_bank
from tests.test_store import FakeClock


HUMAN_TRACE_GAPS = [0.0, 140.0, 310.0, 520.0, 700.0, 940.0, 1150.0, 1400.0, 1650.0]


def make_service(clock=None, thresholds=Thresholds(), seed=42):
    store = ChallengeStore(clock=clock) if clock else ChallengeStore()
    source = (
        TemplateChallengeSource(clock=clock) if clock else TemplateChallengeSource()
    )
    return CaptchaService(
        source=source,
        store=store,
        thresholds=thresholds,
        rng=random.Random(seed),
    )


def crack(answer_hash):
    """Tests know the template bank, so they can recover the plaintext."""
    from keycap.challenge import hash_answer

    for candidate in default_bank().static_answers() | {str(n) for n in range(200)}:
        if hash_answer(candidate) == answer_hash:
            return candidate
    raise AssertionError("answer not crackable from bank")


def human_trace_for(answer, seed=7):
    return synthesize_human_trace(answer, seed=seed)


class TestIssue:
    def test_response_schema(self):
        service = make_service()
        issued = service.issue_challenge("colors")
        assert set(issued) == {"id", "question", "answer_hash", "expires_at"}
        assert len(issued["answer_hash"]) == 64
        assert issued["question"]

    def test_distinct_ids(self):
        service = make_service()
        a = service.issue_challenge()
        b = service.issue_challenge()
        assert a["id"] != b["id"]

    def test_unknown_category_raises(self):
        with pytest.raises(ValueError):
            make_service().issue_challenge("riddles")

    def test_unspecified_category_accepted(self):
        service = make_service()
        seen = set()
        for _ in range(40):
            issued = service.issue_challenge()
            entry = service.store.get(issued["id"])
            seen.add(entry.challenge.category)
        assert len(seen) > 1  # picks vary across the enum

    def test_provider_down_still_issues(self):
        class DownTransport:
            def send(self, prompt, timeout_s):
                raise RuntimeError("no route to host")

        source = LlmChallengeSource(
            ProviderConfig(endpoint_url="https://x.invalid", timeout_ms=10, max_retries=0),
            transport=DownTransport(),
        )
        service = CaptchaService(source=source, rng=random.Random(1))
        issued = service.issue_challenge("colors")
        assert issued["question"]
        assert source.fallback_count == 1


class TestVerify:
    def test_human_flow(self):
        service = make_service()
        issued = service.issue_challenge("animals")
        answer = crack(issued["answer_hash"])
        result = service.verify(issued["id"], answer, human_trace_for(answer))
        assert (result.decision, result.reason) == ("human", "ok")

    def test_unknown_id(self):
        result = make_service().verify("0" * 32, "blue", KeystrokeTrace())
        assert (result.decision, result.reason) == ("error", "unknown_challenge")
        assert result.retry_allowed is False

    def test_expired_id_indistinguishable_from_unknown(self):
        clock = FakeClock(start=1_000_000.0)
        service = make_service(clock=clock)
        issued = service.issue_challenge("colors")
        clock.advance(10 * 60 * 1000)
        answer = crack(issued["answer_hash"])
        result = service.verify(issued["id"], answer, human_trace_for(answer))
        assert result.reason == "unknown_challenge"

    def test_double_verify_after_human(self):
        service = make_service()
        issued = service.issue_challenge("colors")
        answer = crack(issued["answer_hash"])
        first = service.verify(issued["id"], answer, human_trace_for(answer))
        assert first.decision == "human"
        second = service.verify(issued["id"], answer, human_trace_for(answer))
        assert (second.decision, second.reason) == ("error", "already_used")

    def test_typo_then_correct_retry_path(self):
        service = make_service()
        issued = service.issue_challenge("colors")
        answer = crack(issued["answer_hash"])
        wrong = service.verify(issued["id"], "wrongo", human_trace_for("wrongo"))
        assert (wrong.decision, wrong.reason) == ("bot", "hash_mismatch")
        assert wrong.retry_allowed is True
        right = service.verify(issued["id"], answer, human_trace_for(answer))
        assert right.decision == "human"

    def test_second_hash_mismatch_burns_challenge(self):
        service = make_service()
        issued = service.issue_challenge("colors")
        first = service.verify(issued["id"], "nope", human_trace_for("nope"))
        assert first.retry_allowed is True
        second = service.verify(issued["id"], "nope", human_trace_for("nope"))
        assert (second.decision, second.reason) == ("bot", "hash_mismatch")
        assert second.retry_allowed is False
        third = service.verify(issued["id"], "nope", human_trace_for("nope"))
        assert (third.decision, third.reason) == ("error", "already_used")

    def test_behavioral_failure_burns_challenge(self):
        service = make_service()
        issued = service.issue_challenge("colors")
        answer = crack(issued["answer_hash"])
        pasted = KeystrokeTrace(timestamps=[], paste_flagged=True, typed_text=answer)
        first = service.verify(issued["id"], answer, pasted)
        assert (first.decision, first.reason) == ("bot", "paste_detected")
        assert first.retry_allowed is False
        second = service.verify(issued["id"], answer, human_trace_for(answer))
        assert (second.decision, second.reason) == ("error", "already_used")

    def test_non_monotonic_trace_is_an_error_and_burns(self):
        service = make_service()
        issued = service.issue_challenge("colors")
        answer = crack(issued["answer_hash"])
        bad = KeystrokeTrace(timestamps=[100.0, 0.0, 50.0], typed_text=answer)
        result = service.verify(issued["id"], answer, bad)
        assert (result.decision, result.reason) == ("error", "invalid_trace")
        again = service.verify(issued["id"], answer, human_trace_for(answer))
        assert again.reason == "already_used"


class TestConcurrency:
    def test_at_most_one_human_verdict_per_challenge(self):
        service = make_service()
        for _ in range(10):
            issued = service.issue_challenge("animals")
            answer = crack(issued["answer_hash"])
            trace = human_trace_for(answer)
            barrier = threading.Barrier(8)

            def attempt():
                barrier.wait()
                return service.verify(issued["id"], answer, trace)

            with ThreadPoolExecutor(max_workers=8) as pool:
                results = list(pool.map(lambda _: attempt(), range(8)))
            decisions = [r.decision for r in results]
            assert decisions.count("human") == 1
            assert all(
                (r.decision, r.reason) == ("error", "already_used")
                for r in results
                if r.decision != "human"
            )

    def test_concurrent_issues_are_unique(self):
        service = make_service()
        with ThreadPoolExecutor(max_workers=8) as pool:
            issued = list(pool.map(lambda _: service.issue_challenge("colors"), range(64)))
        ids = [i["id"] for i in issued]
        assert len(set(ids)) == len(ids)
