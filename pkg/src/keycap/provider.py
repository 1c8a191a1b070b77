"""External question-generator client with template fallback.

The backend asks a generative-model endpoint for a (question, answer)
pair using one fixed system prompt plus a per-request randomized user
prompt, validates the structured response, and hides the whole exchange
behind a narrow send-text/receive-text transport. Any provider failure
(timeout, transport error, garbage output, retry exhaustion) falls back
to the offline template bank, so challenge issuance is total.
"""

from __future__ import annotations

import json
import logging
import random
import threading
from dataclasses import dataclass, field
from typing import Protocol

import httpx

from .challenge import (
    Category,
    Challenge,
    DEFAULT_TTL_MS,
    make_challenge,
    normalize_answer,
    now_ms,
)
from .templates import TemplateBank, default_bank

logger = logging.getLogger("keycap.provider")

MAX_ANSWER_CHARS = 32

SYSTEM_PROMPT = (
    "You are a CAPTCHA question generator. Produce one very simple question "
    "that any person can answer instantly with a single short word or number. "
    "Respond with exactly one JSON object containing exactly two string keys, "
    '"question" and "answer", and nothing else. The answer must be unambiguous, '
    "at most 32 characters, lowercase, and use digits for numbers."
)

_USER_PROMPTS: dict[Category, list[str]] = {
    Category.COLORS: [
        "Ask a simple question about colors.",
        "Ask an easy everyday question about colors with a one-word answer.",
        "Ask a question about the colors of common objects.",
    ],
    Category.ARITHMETIC: [
        "Ask a simple arithmetic question using small numbers.",
        "Ask an easy arithmetic question a child could answer.",
        "Ask a one-step arithmetic question with a numeric answer.",
    ],
    Category.ANIMALS: [
        "Ask a simple question about animals.",
        "Ask an easy question about a well-known animal.",
        "Ask a question about animals with a one-word answer.",
    ],
    Category.COMMON_SENSE: [
        "Ask a simple common sense question about the everyday world.",
        "Ask an easy common sense question anyone can answer.",
        "Ask a common sense question with an obvious one-word answer.",
    ],
}


class MalformedResponseError(ValueError):
    """Provider output had no usable (question, answer) object."""


class TransportError(RuntimeError):
    """Provider call failed at the transport level."""


class TransportTimeout(TransportError):
    """Provider call exceeded its time budget."""


@dataclass(frozen=True)
class PromptPair:
    system_prompt: str
    user_prompt: str


@dataclass
class ProviderConfig:
    """Connection settings; the key never appears in repr or logs."""

    endpoint_url: str
    api_key: str = field(repr=False, default="")
    timeout_ms: float = 5000.0
    max_retries: int = 2


def build_prompt(category: Category, seed: int) -> PromptPair:
    """Fixed system prompt plus a seeded pick from the category's topics."""
    category = Category(category)
    rng = random.Random(f"{seed}:{category.value}")
    return PromptPair(
        system_prompt=SYSTEM_PROMPT,
        user_prompt=rng.choice(_USER_PROMPTS[category]),
    )


def _first_json_object(raw: str) -> dict:
    """Decode the first JSON object embedded anywhere in raw text."""
    decoder = json.JSONDecoder()
    start = raw.find("{")
    while start != -1:
        try:
            value, _ = decoder.raw_decode(raw, start)
        except json.JSONDecodeError:
            start = raw.find("{", start + 1)
            continue
        if isinstance(value, dict):
            return value
        start = raw.find("{", start + 1)
    raise MalformedResponseError("no JSON object found in provider output")


def parse_model_response(raw: str) -> tuple[str, str]:
    """Extract and validate the question/answer pair from provider output.

    Extra keys are ignored. Raises MalformedResponseError when the object
    is missing, the keys are absent or non-string, or the answer is empty
    or longer than 32 characters after normalization.
    """
    obj = _first_json_object(raw)
    question = obj.get("question")
    answer = obj.get("answer")
    if not isinstance(question, str) or not isinstance(answer, str):
        raise MalformedResponseError("question and answer must both be strings")
    if not question.strip():
        raise MalformedResponseError("question is empty")
    normalized = normalize_answer(answer)
    if not normalized:
        raise MalformedResponseError("answer is empty after normalization")
    if len(normalized) > MAX_ANSWER_CHARS:
        raise MalformedResponseError(
            f"answer exceeds {MAX_ANSWER_CHARS} chars after normalization"
        )
    return question, answer


class Transport(Protocol):
    """Narrow provider boundary: send prompts, get raw text back.

    Implementations must honor timeout_s, raising TransportTimeout (or any
    TransportError) within roughly that budget rather than hanging.
    """

    def send(self, prompt: PromptPair, timeout_s: float) -> str: ...


class HttpTransport:
    """POSTs a chat-style body and digs the text out of common reply shapes."""

    def __init__(self, cfg: ProviderConfig):
        self._cfg = cfg

    def send(self, prompt: PromptPair, timeout_s: float) -> str:
        headers = {}
        if self._cfg.api_key:
            headers["Authorization"] = f"Bearer {self._cfg.api_key}"
        body = {
            "messages": [
                {"role": "system", "content": prompt.system_prompt},
                {"role": "user", "content": prompt.user_prompt},
            ]
        }
        try:
            response = httpx.post(
                self._cfg.endpoint_url, json=body, headers=headers, timeout=timeout_s
            )
        except httpx.TimeoutException as exc:
            raise TransportTimeout("provider call timed out") from exc
        except httpx.HTTPError as exc:
            raise TransportError(f"provider call failed: {type(exc).__name__}") from exc
        if response.status_code != 200:
            raise TransportError(f"provider returned HTTP {response.status_code}")
        return _extract_text(response)


def _extract_text(response: httpx.Response) -> str:
    try:
        body = response.json()
    except ValueError:
        return response.text
    # Chat-completions and generate-content wrappers, then a bare text
    # field; anything else is handed to the parser as raw text.
    try:
        return body["choices"][0]["message"]["content"]
    except (KeyError, IndexError, TypeError):
        pass
    try:
        return body["candidates"][0]["content"]["parts"][0]["text"]
    except (KeyError, IndexError, TypeError):
        pass
    if isinstance(body, dict) and isinstance(body.get("text"), str):
        return body["text"]
    return response.text


class TemplateChallengeSource:
    """Challenge source backed purely by the offline template bank."""

    def __init__(
        self,
        bank: TemplateBank | None = None,
        ttl_ms: float = DEFAULT_TTL_MS,
        clock=now_ms,
    ):
        self.bank = bank or default_bank()
        self.ttl_ms = ttl_ms
        self.clock = clock

    def fetch_challenge(self, category: Category, seed: int) -> Challenge:
        question, answer = self.bank.generate(seed, category)
        return make_challenge(
            question, answer, category, ttl_ms=self.ttl_ms, issued_at_ms=self.clock()
        )


class LlmChallengeSource:
    """Provider-backed source; falls back to templates on any failure.

    Thread-safe: multiple in-flight fetches are fine, and the fallback
    counter is guarded by a lock.
    """

    def __init__(
        self,
        cfg: ProviderConfig,
        transport: Transport | None = None,
        fallback: TemplateChallengeSource | None = None,
        ttl_ms: float = DEFAULT_TTL_MS,
        clock=now_ms,
    ):
        self.cfg = cfg
        self.transport = transport or HttpTransport(cfg)
        self.fallback = fallback or TemplateChallengeSource(ttl_ms=ttl_ms, clock=clock)
        self.ttl_ms = ttl_ms
        self.clock = clock
        self._fallback_count = 0
        self._lock = threading.Lock()

    @property
    def fallback_count(self) -> int:
        with self._lock:
            return self._fallback_count

    def _record_fallback(self, reason: str) -> None:
        with self._lock:
            self._fallback_count += 1
        logger.warning("provider fallback to templates: %s", reason)

    def fetch_challenge(self, category: Category, seed: int) -> Challenge:
        """Always returns a valid challenge, whatever the provider does."""
        category = Category(category)
        prompt = build_prompt(category, seed)
        timeout_s = self.cfg.timeout_ms / 1000.0
        attempts = self.cfg.max_retries + 1
        failure = "no attempt made"
        for attempt in range(1, attempts + 1):
            try:
                raw = self.transport.send(prompt, timeout_s)
                question, answer = parse_model_response(raw)
                return make_challenge(
                    question,
                    answer,
                    category,
                    ttl_ms=self.ttl_ms,
                    issued_at_ms=self.clock(),
                )
            except Exception as exc:  # totality: any provider behavior falls back
                failure = f"{type(exc).__name__} on attempt {attempt}/{attempts}"
                logger.debug("provider attempt failed: %s", failure)
        self._record_fallback(failure)
        return self.fallback.fetch_challenge(category, seed)
