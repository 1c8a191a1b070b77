"""Adversarial evaluation harness.

Simulates the three adversary styles (paste injection, fixed-delay typing,
randomized-delay typing) plus a synthetic human typist, runs seeded trial
groups against template-sourced challenges, and emits a per-group results
table. Default mode bypasses HTTP and classifies in-process for bit-exact
reproducibility; HTTP mode drives a live service instead and recovers the
plaintext answer by dictionary attack on the published answer digest,
which doubles as a demonstration of a known protocol weakness.

The synthetic human profile is an implementer-chosen stand-in for real
typists, not measured human data. Its defaults were pinned by the
calibration run in scripts/calibrate_human_profile.py; rerun that script
before changing them.
"""

from __future__ import annotations

import csv
import io
import json
import random
from collections import Counter
from dataclasses import dataclass, field

import httpx

from .challenge import Category, hash_answer, make_challenge, normalize_answer
from .classify import Reason, Thresholds, classify, describe_reason
from .features import KeystrokeTrace
from .templates import TemplateBank, default_bank


class UnknownFormatError(ValueError):
    """Raised for a report format emit_report does not know."""


class UnknownStrategyError(ValueError):
    """Raised for a trace-synthesis strategy the harness does not know."""


STRATEGY_PASTE = "paste"
STRATEGY_FIXED_DELAY = "fixed_delay"
STRATEGY_RANDOM_DELAY = "random_delay"
STRATEGY_HUMAN = "human"

BOT_STRATEGIES = (STRATEGY_PASTE, STRATEGY_FIXED_DELAY, STRATEGY_RANDOM_DELAY)


@dataclass(frozen=True)
class BotStrategy:
    """A scripted adversary. delay_* fields apply to their matching kind."""

    kind: str
    delay_ms: float = 50.0
    delay_mean_ms: float = 180.0
    delay_stddev_ms: float = 60.0
    rng_seed: int = 0

    def __post_init__(self):
        if self.kind not in BOT_STRATEGIES:
            raise UnknownStrategyError(self.kind)
        if min(self.delay_ms, self.delay_mean_ms, self.delay_stddev_ms) < 0:
            raise ValueError("delay parameters must be >= 0")


@dataclass(frozen=True)
class HumanProfile:
    """Gap distribution for the synthetic typist (truncated normal)."""

    mean_gap_ms: float = 180.0
    gap_stddev_ms: float = 250.0


def synthesize_bot_trace(strategy: BotStrategy, answer: str) -> KeystrokeTrace:
    """Produce the trace a scripted bot would generate for an answer.

    paste: no keydowns at all, paste flag set. fixed_delay: one keydown per
    character at exact delay multiples. random_delay: seeded normal gaps
    truncated at zero.
    """
    if strategy.kind == STRATEGY_PASTE:
        return KeystrokeTrace(timestamps=[], paste_flagged=True, typed_text=answer)
    if not answer:
        raise ValueError("typing strategies need a non-empty answer")
    if strategy.kind == STRATEGY_FIXED_DELAY:
        timestamps = [i * strategy.delay_ms for i in range(len(answer))]
        return KeystrokeTrace(timestamps=timestamps, paste_flagged=False, typed_text=answer)
    rng = random.Random(strategy.rng_seed)
    timestamps = [0.0]
    for _ in range(len(answer) - 1):
        gap = rng.gauss(strategy.delay_mean_ms, strategy.delay_stddev_ms)
        while gap < 0:
            gap = rng.gauss(strategy.delay_mean_ms, strategy.delay_stddev_ms)
        timestamps.append(timestamps[-1] + gap)
    return KeystrokeTrace(timestamps=timestamps, paste_flagged=False, typed_text=answer)


def synthesize_human_trace(
    answer: str, seed: int, profile: HumanProfile = HumanProfile()
) -> KeystrokeTrace:
    """Seeded human-like trace: strictly increasing, one keydown per char."""
    if profile.gap_stddev_ms <= 0:
        raise ValueError("profile.gap_stddev_ms must be > 0")
    if not answer:
        raise ValueError("answer must be non-empty")
    rng = random.Random(seed)
    timestamps = [0.0]
    for _ in range(len(answer) - 1):
        gap = rng.gauss(profile.mean_gap_ms, profile.gap_stddev_ms)
        while gap <= 0:
            gap = rng.gauss(profile.mean_gap_ms, profile.gap_stddev_ms)
        timestamps.append(timestamps[-1] + gap)
    return KeystrokeTrace(timestamps=timestamps, paste_flagged=False, typed_text=answer)


@dataclass(frozen=True)
class TrialRecord:
    group: str
    trial_index: int
    reason: str
    question: str

    def to_dict(self) -> dict:
        return {
            "group": self.group,
            "trial_index": self.trial_index,
            "reason": self.reason,
            "question": self.question,
        }


@dataclass(frozen=True)
class GroupResult:
    group: str
    trials: int
    success_count: int
    success_rate_percent: float
    modal_failure_reason: str  # reason code, "" when every trial passed


@dataclass(frozen=True)
class ExperimentReport:
    groups: tuple[GroupResult, ...]

    def to_dict(self) -> dict:
        return {
            "groups": [
                {
                    "group": g.group,
                    "trials": g.trials,
                    "success_count": g.success_count,
                    "success_rate_percent": g.success_rate_percent,
                    "modal_failure_reason": g.modal_failure_reason,
                }
                for g in self.groups
            ]
        }


@dataclass
class GroupConfig:
    name: str
    strategy: str
    trials: int
    delay_ms: float = 50.0
    delay_mean_ms: float = 180.0
    delay_stddev_ms: float = 60.0
    mean_gap_ms: float = HumanProfile.mean_gap_ms
    gap_stddev_ms: float = HumanProfile.gap_stddev_ms

    def __post_init__(self):
        if self.strategy not in BOT_STRATEGIES + (STRATEGY_HUMAN,):
            raise UnknownStrategyError(self.strategy)
        if self.trials < 0:
            raise ValueError("trials must be >= 0")


@dataclass
class ExperimentConfig:
    groups: list[GroupConfig]
    seed: int = 0
    thresholds: Thresholds = field(default_factory=Thresholds)
    categories: list[Category] = field(
        default_factory=lambda: [Category.COLORS, Category.ANIMALS, Category.COMMON_SENSE]
    )
    challenge_source: str = "template"  # "template" or "http"
    http_base_url: str = "http://127.0.0.1:8000"
    template_bank_path: str | None = None

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        try:
            groups = [GroupConfig(**g) for g in data["groups"]]
        except KeyError as exc:
            raise ValueError(f"experiment config missing key: {exc}") from exc
        except TypeError as exc:
            raise ValueError(f"bad group record: {exc}") from exc
        cfg = cls(groups=groups)
        if "seed" in data:
            cfg.seed = int(data["seed"])
        if "thresholds" in data:
            cfg.thresholds = Thresholds(**data["thresholds"])
        if "categories" in data:
            cfg.categories = [Category(c) for c in data["categories"]]
        if "challenge_source" in data:
            cfg.challenge_source = data["challenge_source"]
        if "http_base_url" in data:
            cfg.http_base_url = data["http_base_url"]
        if "template_bank" in data and data["template_bank"] is not None:
            cfg.template_bank_path = data["template_bank"]
        cfg.validate()
        return cfg

    def validate(self) -> None:
        if self.challenge_source not in ("template", "http"):
            raise ValueError(f"unknown challenge_source {self.challenge_source!r}")
        if not self.groups:
            raise ValueError("experiment needs at least one group")
        if not self.categories:
            raise ValueError("experiment needs at least one category")
        names = [g.name for g in self.groups]
        if len(set(names)) != len(names):
            raise ValueError("group names must be unique")


def _trace_for(group: GroupConfig, answer: str, trace_seed: int) -> KeystrokeTrace:
    if group.strategy == STRATEGY_HUMAN:
        profile = HumanProfile(group.mean_gap_ms, group.gap_stddev_ms)
        return synthesize_human_trace(answer, trace_seed, profile)
    strategy = BotStrategy(
        kind=group.strategy,
        delay_ms=group.delay_ms,
        delay_mean_ms=group.delay_mean_ms,
        delay_stddev_ms=group.delay_stddev_ms,
        rng_seed=trace_seed,
    )
    return synthesize_bot_trace(strategy, answer)


def crack_answer(answer_hash: str, bank: TemplateBank, max_number: int = 200) -> str | None:
    """Dictionary attack on a published answer digest.

    Works because the protocol ships the hash of a low-entropy answer to
    the client; used by HTTP-mode runs to recover the plaintext the
    in-process path gets for free.
    """
    for candidate in sorted(bank.static_answers()):
        if hash_answer(candidate) == answer_hash:
            return candidate
    for number in range(max_number + 1):
        if hash_answer(str(number)) == answer_hash:
            return str(number)
    return None


class _TemplateTrialSource:
    """In-process challenge + verdict path (deterministic)."""

    def __init__(self, cfg: ExperimentConfig, bank: TemplateBank):
        self._bank = bank
        self._thresholds = cfg.thresholds

    def run_trial(self, group: GroupConfig, category: Category, challenge_seed: int, trace_seed: int):
        question, answer = self._bank.generate(challenge_seed, category)
        challenge = make_challenge(question, answer, category)
        answer = normalize_answer(answer)
        trace = _trace_for(group, answer, trace_seed)
        verdict = classify(answer, trace, challenge.answer_hash, self._thresholds)
        return verdict.reason.value, question


class _HttpTrialSource:
    """End-to-end path through a live service."""

    def __init__(self, cfg: ExperimentConfig, bank: TemplateBank):
        self._base = cfg.http_base_url.rstrip("/")
        self._bank = bank
        self._client = httpx.Client(timeout=10.0)

    def run_trial(self, group: GroupConfig, category: Category, challenge_seed: int, trace_seed: int):
        issued = self._client.post(
            f"{self._base}/api/challenge", json={"category": category.value}
        )
        issued.raise_for_status()
        body = issued.json()
        answer = crack_answer(body["answer_hash"], self._bank)
        if answer is None:
            raise RuntimeError(f"could not crack answer for question {body['question']!r}")
        trace = _trace_for(group, answer, trace_seed)
        response = self._client.post(
            f"{self._base}/api/verify",
            json={
                "challenge_id": body["id"],
                "typed_text": answer,
                "trace": trace.to_dict(),
            },
        )
        response.raise_for_status()
        return response.json()["reason"], body["question"]

    def close(self) -> None:
        self._client.close()


def run_experiment(
    config: ExperimentConfig,
) -> tuple[ExperimentReport, list[TrialRecord]]:
    """Run every group's trials; deterministic for a fixed config seed.

    Trials run sequentially so reports are reproducible bit for bit.
    """
    config.validate()
    bank = (
        TemplateBank.load(config.template_bank_path)
        if config.template_bank_path
        else default_bank()
    )
    if config.challenge_source == "http":
        source = _HttpTrialSource(config, bank)
    else:
        source = _TemplateTrialSource(config, bank)

    records: list[TrialRecord] = []
    results: list[GroupResult] = []
    try:
        for group in config.groups:
            rng = random.Random(f"{config.seed}:{group.name}")
            reasons: Counter[str] = Counter()
            for trial_index in range(group.trials):
                challenge_seed = rng.getrandbits(32)
                category = rng.choice(config.categories)
                trace_seed = rng.getrandbits(32)
                reason, question = source.run_trial(
                    group, category, challenge_seed, trace_seed
                )
                reasons[reason] += 1
                records.append(
                    TrialRecord(
                        group=group.name,
                        trial_index=trial_index,
                        reason=reason,
                        question=question,
                    )
                )
            success = reasons.get(Reason.OK.value, 0)
            failures = Counter(
                {r: c for r, c in reasons.items() if r != Reason.OK.value}
            )
            modal = failures.most_common(1)[0][0] if failures else ""
            rate = 100.0 * success / group.trials if group.trials else 0.0
            results.append(
                GroupResult(
                    group=group.name,
                    trials=group.trials,
                    success_count=success,
                    success_rate_percent=rate,
                    modal_failure_reason=modal,
                )
            )
    finally:
        if isinstance(source, _HttpTrialSource):
            source.close()
    return ExperimentReport(groups=tuple(results)), records


_REPORT_COLUMNS = ("group", "trials", "success_rate_percent", "primary_failure_reason")


def _reason_label(code: str) -> str:
    if not code:
        return "-"
    try:
        return describe_reason(Reason(code))
    except ValueError:
        return code


def emit_report(report: ExperimentReport, format: str = "text_table") -> str:
    """Render the per-group table; columns are stable across formats."""
    rows = [
        (
            g.group,
            str(g.trials),
            f"{g.success_rate_percent:g}",
            _reason_label(g.modal_failure_reason),
        )
        for g in report.groups
    ]
    if format == "csv":
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(_REPORT_COLUMNS)
        writer.writerows(rows)
        return buffer.getvalue()
    if format == "text_table":
        table = [_REPORT_COLUMNS, *rows]
        widths = [max(len(row[i]) for row in table) for i in range(len(_REPORT_COLUMNS))]
        lines = [
            "  ".join(cell.ljust(widths[i]) for i, cell in enumerate(row)).rstrip()
            for row in table
        ]
        return "\n".join(lines) + "\n"
    raise UnknownFormatError(format)


def write_trial_records(records: list[TrialRecord], path) -> None:
    """Stream trial records as line-delimited JSON."""
    with open(path, "w", encoding="utf-8") as fh:
        for record in records:
            fh.write(json.dumps(record.to_dict()) + "\n")
