"""Service configuration: JSON file, environment, then CLI flag overrides.

Precedence is lowest-to-highest: built-in defaults, config file values,
KEYCAP_* environment variables, explicit CLI flags. The provider API key
is only ever read from the environment so it cannot end up in shell
history or config files checked into a repo.
"""

from __future__ import annotations

import dataclasses
import json
import os
from dataclasses import dataclass, field
from pathlib import Path

from .challenge import DEFAULT_TTL_MS
from .classify import Thresholds
from .provider import LlmChallengeSource, ProviderConfig, TemplateChallengeSource
from .service import CaptchaService
from .store import ChallengeStore
from .templates import TemplateBank, default_bank

ENV_PREFIX = "KEYCAP_"


@dataclass
class ProviderSettings:
    enabled: bool = False
    endpoint_url: str = ""
    api_key: str = field(repr=False, default="")
    timeout_ms: float = 5000.0
    max_retries: int = 2


@dataclass
class ServiceConfig:
    host: str = "127.0.0.1"
    port: int = 8000
    ttl_ms: float = DEFAULT_TTL_MS
    capacity: int = 10_000
    seed: int | None = None
    thresholds: Thresholds = field(default_factory=Thresholds)
    template_bank: str | None = None
    static_dir: str | None = None
    sweep_interval_s: float = 30.0
    provider: ProviderSettings = field(default_factory=ProviderSettings)

    def validate(self) -> None:
        th = self.thresholds
        for name in ("min_stddev_ms", "min_total_ms", "min_len_for_total_check", "min_keystrokes"):
            if getattr(th, name) < 0:
                raise ValueError(f"thresholds.{name} must be >= 0")
        if self.ttl_ms <= 0:
            raise ValueError("ttl_ms must be > 0")
        if self.capacity <= 0:
            raise ValueError("capacity must be > 0")
        if self.provider.enabled:
            if not self.provider.endpoint_url:
                raise ValueError("provider.endpoint_url required when provider enabled")
            if self.provider.timeout_ms <= 0:
                raise ValueError("provider.timeout_ms must be > 0")


def _from_file(path: str | Path) -> dict:
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    if not isinstance(data, dict):
        raise ValueError("config file must hold a JSON object")
    return data


def _env(name: str) -> str | None:
    return os.environ.get(ENV_PREFIX + name)


def load_config(
    config_path: str | Path | None = None,
    overrides: dict | None = None,
    environ: bool = True,
) -> ServiceConfig:
    """Merge defaults, file, environment, and explicit overrides, in that order."""
    cfg = ServiceConfig()
    if config_path is not None:
        data = _from_file(config_path)
        _apply(cfg, data)
    if environ:
        _apply_env(cfg)
    if overrides:
        _apply(cfg, overrides)
    cfg.validate()
    return cfg


def _apply(cfg: ServiceConfig, data: dict) -> None:
    scalar_fields = {
        "host": str,
        "port": int,
        "ttl_ms": float,
        "capacity": int,
        "template_bank": str,
        "static_dir": str,
        "sweep_interval_s": float,
    }
    for name, cast in scalar_fields.items():
        if data.get(name) is not None:
            setattr(cfg, name, cast(data[name]))
    if "seed" in data:
        cfg.seed = None if data["seed"] is None else int(data["seed"])
    if data.get("thresholds") is not None:
        th = data["thresholds"]
        cfg.thresholds = dataclasses.replace(
            cfg.thresholds,
            **{
                k: type(getattr(cfg.thresholds, k))(v)
                for k, v in th.items()
                if k in {f.name for f in dataclasses.fields(Thresholds)}
            },
        )
    if data.get("provider") is not None:
        p = data["provider"]
        for name in ("enabled", "endpoint_url", "api_key", "timeout_ms", "max_retries"):
            if p.get(name) is not None:
                setattr(cfg.provider, name, p[name])


def _apply_env(cfg: ServiceConfig) -> None:
    if (v := _env("HOST")) is not None:
        cfg.host = v
    if (v := _env("PORT")) is not None:
        cfg.port = int(v)
    if (v := _env("TTL_MS")) is not None:
        cfg.ttl_ms = float(v)
    if (v := _env("CAPACITY")) is not None:
        cfg.capacity = int(v)
    if (v := _env("TEMPLATE_BANK")) is not None:
        cfg.template_bank = v
    if (v := _env("STATIC_DIR")) is not None:
        cfg.static_dir = v
    if (v := _env("PROVIDER_URL")) is not None:
        cfg.provider.endpoint_url = v
        cfg.provider.enabled = True
    if (v := _env("API_KEY")) is not None:
        cfg.provider.api_key = v
    if (v := _env("PROVIDER_TIMEOUT_MS")) is not None:
        cfg.provider.timeout_ms = float(v)
    if (v := _env("PROVIDER_MAX_RETRIES")) is not None:
        cfg.provider.max_retries = int(v)


def build_service(cfg: ServiceConfig) -> CaptchaService:
    """Wire a CaptchaService from a validated configuration."""
    import random

    bank = TemplateBank.load(cfg.template_bank) if cfg.template_bank else default_bank()
    template_source = TemplateChallengeSource(bank=bank, ttl_ms=cfg.ttl_ms)
    if cfg.provider.enabled:
        provider_cfg = ProviderConfig(
            endpoint_url=cfg.provider.endpoint_url,
            api_key=cfg.provider.api_key,
            timeout_ms=cfg.provider.timeout_ms,
            max_retries=cfg.provider.max_retries,
        )
        source = LlmChallengeSource(
            provider_cfg, fallback=template_source, ttl_ms=cfg.ttl_ms
        )
    else:
        source = template_source
    store = ChallengeStore(capacity=cfg.capacity)
    rng = random.Random(cfg.seed) if cfg.seed is not None else random.Random()
    return CaptchaService(
        source=source, store=store, thresholds=cfg.thresholds, rng=rng
    )
