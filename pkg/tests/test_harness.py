"""Harness: trace synthesis shapes, experiment determinism, report formats."""

import json

import pytest

from keycap.challenge import Category
from keycap.classify import Thresholds, classify, hash_answer
from keycap.features import compute_features
from keycap.harness import (
    BotStrategy,
    ExperimentConfig,
    GroupConfig,
    HumanProfile,
    UnknownFormatError,
    UnknownStrategyError,
    crack_answer,
    emit_report,
    run_experiment,
    synthesize_bot_trace,
    synthesize_human_trace,
    write_trial_records,
)
from keycap.templates import default_bank


class TestBotTraces:
    def test_fixed_delay_shape(self):
        trace = synthesize_bot_trace(BotStrategy("fixed_delay", delay_ms=50), "blue")
        assert trace.timestamps == [0, 50, 100, 150]
        assert trace.paste_flagged is False
        assert trace.typed_text == "blue"

    def test_paste_shape(self):
        trace = synthesize_bot_trace(BotStrategy("paste"), "blue")
        assert trace.timestamps == []
        assert trace.paste_flagged is True
        assert trace.typed_text == "blue"

    def test_random_delay_deterministic(self):
        strategy = BotStrategy(
            "random_delay", delay_mean_ms=180, delay_stddev_ms=60, rng_seed=1
        )
        assert synthesize_bot_trace(strategy, "blue") == synthesize_bot_trace(
            strategy, "blue"
        )

    def test_random_delay_gaps_nonnegative(self):
        strategy = BotStrategy(
            "random_delay", delay_mean_ms=20, delay_stddev_ms=200, rng_seed=3
        )
        trace = synthesize_bot_trace(strategy, "breakfast")
        gaps = [b - a for a, b in zip(trace.timestamps, trace.timestamps[1:])]
        assert all(g >= 0 for g in gaps)

    def test_typing_strategy_rejects_empty_answer(self):
        with pytest.raises(ValueError):
            synthesize_bot_trace(BotStrategy("fixed_delay"), "")

    def test_unknown_kind(self):
        with pytest.raises(UnknownStrategyError):
            BotStrategy("telepathy")

    def test_negative_delay_rejected(self):
        with pytest.raises(ValueError):
            BotStrategy("fixed_delay", delay_ms=-1)

    def test_fixed_delay_always_low_variance_bot(self):
        # exact-zero stddev for any delay and any answer of >= 2 chars
        for delay in (1.0, 37.5, 50.0, 400.0):
            for answer in ("ox", "blue", "breakfast"):
                trace = synthesize_bot_trace(
                    BotStrategy("fixed_delay", delay_ms=delay), answer
                )
                verdict = classify(answer, trace, hash_answer(answer), Thresholds())
                assert verdict.reason.value == "low_variance"
                assert verdict.features.stddev_latency_ms == 0.0


class TestHumanTraces:
    def test_shape_and_monotonicity(self):
        trace = synthesize_human_trace("blue", seed=3, profile=HumanProfile(180, 60))
        assert len(trace.timestamps) == 4
        assert all(b > a for a, b in zip(trace.timestamps, trace.timestamps[1:]))
        assert trace.paste_flagged is False

    def test_deterministic(self):
        args = ("blue", 3, HumanProfile(180, 60))
        assert synthesize_human_trace(*args) == synthesize_human_trace(*args)

    def test_requires_positive_stddev(self):
        with pytest.raises(ValueError):
            synthesize_human_trace("blue", 1, HumanProfile(180, 0))

    def test_pinned_profile_beats_variance_gate(self):
        # calibration oracle: at the pinned defaults, the stddev check
        # clears 20 ms in >= 99% of 1000 seeded traces on a short answer
        passing = 0
        for seed in range(1000):
            trace = synthesize_human_trace("tiger", seed=seed)
            if compute_features(trace).stddev_latency_ms > 20.0:
                passing += 1
        assert passing >= 990


class TestRunExperiment:
    def config(self, groups, seed=7):
        return ExperimentConfig(groups=groups, seed=seed)

    def test_paste_group_all_blocked(self):
        report, records = run_experiment(
            self.config([GroupConfig("paste_bot", "paste", trials=20)])
        )
        (result,) = report.groups
        assert result.success_rate_percent == 0.0
        assert result.modal_failure_reason == "paste_detected"
        assert all(r.reason == "paste_detected" for r in records)

    def test_fixed_delay_group_all_low_variance(self):
        report, records = run_experiment(
            self.config([GroupConfig("typing_bot", "fixed_delay", trials=20, delay_ms=50)])
        )
        (result,) = report.groups
        assert result.success_rate_percent == 0.0
        assert result.modal_failure_reason == "low_variance"

    def test_human_group_passes(self):
        report, _ = run_experiment(
            self.config([GroupConfig("people", "human", trials=40)])
        )
        (result,) = report.groups
        assert result.success_count >= 39

    def test_reproducible_bit_for_bit(self):
        config = [
            GroupConfig("paste_bot", "paste", trials=10),
            GroupConfig("people", "human", trials=10),
            GroupConfig("rng_bot", "random_delay", trials=10),
        ]
        first = run_experiment(self.config(config, seed=123))
        second = run_experiment(self.config(config, seed=123))
        assert first == second
        different = run_experiment(self.config(config, seed=124))
        assert different != first

    def test_trial_records_structure(self):
        _, records = run_experiment(
            self.config([GroupConfig("paste_bot", "paste", trials=3)])
        )
        assert [r.trial_index for r in records] == [0, 1, 2]
        assert all(r.group == "paste_bot" and r.question for r in records)

    def test_bad_config_rejected_before_trials(self):
        with pytest.raises(ValueError):
            run_experiment(ExperimentConfig(groups=[]))
        with pytest.raises(ValueError):
            ExperimentConfig.from_dict({"groups": [{"name": "x"}]})
        with pytest.raises(ValueError):
            run_experiment(
                ExperimentConfig(
                    groups=[GroupConfig("a", "paste", 1)], challenge_source="carrier_pigeon"
                )
            )

    def test_from_dict_round_trip(self):
        config = ExperimentConfig.from_dict(
            {
                "seed": 99,
                "categories": ["colors"],
                "thresholds": {"min_stddev_ms": 10.0},
                "groups": [
                    {"name": "g1", "strategy": "fixed_delay", "trials": 2, "delay_ms": 10}
                ],
            }
        )
        assert config.seed == 99
        assert config.categories == [Category.COLORS]
        assert config.thresholds.min_stddev_ms == 10.0
        report, _ = run_experiment(config)
        assert report.groups[0].trials == 2


class TestEmitReport:
    def sample_report(self):
        report, _ = run_experiment(
            ExperimentConfig(
                groups=[
                    GroupConfig("paste_bot", "paste", trials=5),
                    GroupConfig("people", "human", trials=5),
                ],
                seed=11,
            )
        )
        return report

    def test_text_table(self):
        text = emit_report(self.sample_report(), "text_table")
        lines = text.strip().splitlines()
        assert lines[0].split()[:2] == ["group", "trials"]
        paste_row = next(line for line in lines if line.startswith("paste_bot"))
        assert "0" in paste_row and "Paste" in paste_row

    def test_csv(self):
        text = emit_report(self.sample_report(), "csv")
        lines = text.strip().splitlines()
        assert lines[0] == "group,trials,success_rate_percent,primary_failure_reason"
        assert len(lines) == 3
        assert all("," in line for line in lines)

    def test_empty_report_header_only(self):
        from keycap.harness import ExperimentReport

        assert emit_report(ExperimentReport(groups=()), "csv").strip() == (
            "group,trials,success_rate_percent,primary_failure_reason"
        )

    def test_unknown_format(self):
        with pytest.raises(UnknownFormatError):
            emit_report(self.sample_report(), "parquet")

    def test_write_trial_records_jsonl(self, tmp_path):
        _, records = run_experiment(
            ExperimentConfig(groups=[GroupConfig("paste_bot", "paste", trials=4)])
        )
        out = tmp_path / "records.jsonl"
        write_trial_records(records, out)
        lines = out.read_text().strip().splitlines()
        assert len(lines) == 4
        parsed = json.loads(lines[0])
        assert set(parsed) == {"group", "trial_index", "reason", "question"}


class TestCrackAnswer:
    def test_recovers_bank_answers(self):
        bank = default_bank()
        for seed in range(50):
            for category in Category:
                _, answer = bank.generate(seed, category)
                assert crack_answer(hash_answer(answer), bank) == answer

    def test_unknown_hash_returns_none(self):
        assert crack_answer("f" * 64, default_bank()) is None


class TestHttpMode:
    def test_experiment_drives_a_live_service(self):
        import random
        import socket
        import threading
        import time

        import uvicorn

        from keycap.provider import TemplateChallengeSource
        from keycap.server import create_app
        from keycap.service import CaptchaService

        service = CaptchaService(source=TemplateChallengeSource(), rng=random.Random(8))
        app = create_app(service)
        with socket.socket() as probe:
            probe.bind(("127.0.0.1", 0))
            port = probe.getsockname()[1]
        server = uvicorn.Server(
            uvicorn.Config(app, host="127.0.0.1", port=port, log_level="warning")
        )
        thread = threading.Thread(target=server.run, daemon=True)
        thread.start()
        try:
            deadline = time.monotonic() + 10
            while not server.started:
                assert time.monotonic() < deadline
                time.sleep(0.01)
            config = ExperimentConfig(
                groups=[
                    GroupConfig("paste_bot", "paste", trials=4),
                    GroupConfig("people", "human", trials=4),
                ],
                seed=3,
                challenge_source="http",
                http_base_url=f"http://127.0.0.1:{port}",
            )
            report, records = run_experiment(config)
        finally:
            server.should_exit = True
            thread.join(timeout=10)
        by_name = {g.group: g for g in report.groups}
        assert by_name["paste_bot"].success_rate_percent == 0.0
        assert by_name["paste_bot"].modal_failure_reason == "paste_detected"
        assert by_name["people"].success_count == 4
        assert len(records) == 8
