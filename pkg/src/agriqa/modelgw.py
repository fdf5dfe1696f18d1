"""Clients for the two external text providers.

Answer generation talks to a hosted seq2seq inference endpoint; rephrasing
talks to a foundation-model endpoint using one fixed prompt. Both speak a
minimal JSON-over-HTTP contract: POST {"input": text, "model": name} ->
{"output": text}, bearer auth when a token is configured.

Generation failures are errors; rephrase failures never are. The rephrase
layer is an enhancement, so every provider fault degrades to serving the
raw answer with a fallback status.

``stub:<path>`` base URLs select the built-in deterministic provider: a
fixture file of {"input", "output"} JSON lines matched on exact input,
used by tests, demos, and offline runs.
"""

from __future__ import annotations

import enum
import json
import logging
import random
import time
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import httpx

from .normalize import NormalizationRuleSet, normalize_text

logger = logging.getLogger(__name__)

REPHRASE_PROMPT_PREFIX = "Paraphrase and Correct Tone: "

# Backoff between retries of non-timeout faults. Kept short: provider
# timeouts already bound total wall time at timeout * (1 + max_retries).
_BACKOFF_BASE = 0.05
_BACKOFF_CAP = 0.5


class ProviderError(Exception):
    """Base class for provider call failures."""


class ProviderTimeout(ProviderError):
    """No response within the configured timeout, after all retries."""


class ProviderStatusError(ProviderError):
    """Non-2xx HTTP status (or stub fixture miss)."""

    def __init__(self, status: int, message: str):
        super().__init__(message)
        self.status = status


class ProviderResponseError(ProviderError):
    """2xx response whose body is malformed or empty."""


@dataclass(frozen=True)
class ProviderConfig:
    base_url: str
    model_name: str = ""
    timeout: float = 10.0
    max_retries: int = 2
    auth_token: str | None = None

    def __post_init__(self) -> None:
        if self.timeout <= 0:
            raise ValueError("timeout must be positive")
        if self.max_retries < 0:
            raise ValueError("max_retries must be >= 0")

    @property
    def is_stub(self) -> bool:
        return self.base_url.startswith("stub:")


class FixtureStore:
    """Deterministic input -> output lookup backed by a JSONL fixture file.

    An optional ``__default__`` entry serves unmatched inputs; its output
    may embed ``{input}``.
    """

    def __init__(self, path: str | Path):
        self.path = Path(path)
        if not self.path.exists():
            raise ProviderResponseError(f"stub fixture file not found: {self.path}")
        self._entries: dict[str, str] = {}
        with self.path.open(encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                obj = json.loads(line)
                self._entries[obj["input"]] = obj["output"]

    def lookup(self, input_text: str) -> str:
        if input_text in self._entries:
            return self._entries[input_text]
        default = self._entries.get("__default__")
        if default is not None:
            return default.replace("{input}", input_text)
        raise ProviderStatusError(404, f"no fixture for input: {input_text[:80]!r}")


_fixture_cache: dict[Path, FixtureStore] = {}


def _stub_lookup(cfg: ProviderConfig, input_text: str) -> str:
    raw = cfg.base_url[5:]
    if raw.startswith("//"):
        raw = raw[2:]
    path = Path(raw)
    store = _fixture_cache.get(path)
    if store is None:
        store = FixtureStore(path)
        _fixture_cache[path] = store
    return store.lookup(input_text)


def _call_provider(cfg: ProviderConfig, input_text: str) -> str:
    """One logical provider call with the retry policy applied.

    Timeouts and 5xx/connection faults are retried up to max_retries;
    timeouts retry immediately (the wait already happened), other faults
    back off briefly with jitter. 4xx and malformed bodies never retry.
    """
    if cfg.is_stub:
        output = _stub_lookup(cfg, input_text)
        if not output.strip():
            raise ProviderResponseError("provider returned empty output")
        return output

    headers = {}
    if cfg.auth_token:
        headers["Authorization"] = f"Bearer {cfg.auth_token}"
    payload = {"input": input_text, "model": cfg.model_name}

    last_error: ProviderError | None = None
    for attempt in range(1 + cfg.max_retries):
        if attempt and not isinstance(last_error, ProviderTimeout):
            delay = min(_BACKOFF_BASE * (2 ** (attempt - 1)), _BACKOFF_CAP)
            time.sleep(delay * (1.0 + 0.5 * random.random()))
        try:
            response = httpx.post(
                cfg.base_url, json=payload, headers=headers, timeout=cfg.timeout
            )
        except httpx.TimeoutException:
            last_error = ProviderTimeout(
                f"no response from {cfg.base_url} within {cfg.timeout}s"
            )
            logger.warning("provider timeout (attempt %d/%d)", attempt + 1, 1 + cfg.max_retries)
            continue
        except httpx.HTTPError as exc:
            last_error = ProviderStatusError(0, f"transport error: {exc}")
            logger.warning("provider transport error (attempt %d): %s", attempt + 1, exc)
            continue

        if response.status_code >= 500:
            last_error = ProviderStatusError(
                response.status_code, f"provider returned {response.status_code}"
            )
            logger.warning(
                "provider %d (attempt %d/%d)",
                response.status_code, attempt + 1, 1 + cfg.max_retries,
            )
            continue
        if response.status_code >= 300:
            raise ProviderStatusError(
                response.status_code, f"provider returned {response.status_code}"
            )

        try:
            body = response.json()
            output = body["output"]
        except (json.JSONDecodeError, KeyError, TypeError) as exc:
            raise ProviderResponseError(
                f"malformed provider response: {response.text[:120]!r}"
            ) from exc
        if not isinstance(output, str) or not output.strip():
            raise ProviderResponseError("provider returned empty output")
        return output

    assert last_error is not None
    raise last_error


def generate_answer(query: str, cfg: ProviderConfig) -> str:
    """Fetch the generated answer for a normalized query, verbatim."""
    if not query.strip():
        raise ValueError("query must be non-empty")
    return _call_provider(cfg, query)


def build_rephrase_prompt(response: str) -> str:
    """The fixed rephrasing prompt: prefix + response, byte for byte."""
    if not response:
        raise ValueError("response must be non-empty")
    return REPHRASE_PROMPT_PREFIX + response


class RephraseStatus(enum.Enum):
    OK = "ok"
    SKIPPED = "skipped"
    FALLBACK_PROVIDER_ERROR = "fallback_provider_error"
    FALLBACK_TIMEOUT = "fallback_timeout"


def rephrase(raw_answer: str, cfg: ProviderConfig) -> tuple[str | None, RephraseStatus]:
    """Polish a generated answer; never raises on provider trouble.

    Returns (text, OK) on success, else (None, fallback status). The
    caller keeps serving the raw answer either way.
    """
    if not raw_answer.strip():
        raise ValueError("raw_answer must be non-empty")
    try:
        return _call_provider(cfg, build_rephrase_prompt(raw_answer)), RephraseStatus.OK
    except ProviderTimeout:
        logger.warning("rephrase timed out; serving raw answer")
        return None, RephraseStatus.FALLBACK_TIMEOUT
    except ProviderError as exc:
        logger.warning("rephrase failed (%s); serving raw answer", exc)
        return None, RephraseStatus.FALLBACK_PROVIDER_ERROR


@dataclass(frozen=True)
class AnswerBundle:
    """The served result: raw local-tone answer plus optional polished one."""

    query_normalized: str
    raw_answer: str
    rephrased_answer: str | None
    rephrase_status: RephraseStatus
    latency_generate: float
    latency_rephrase: float | None

    def __post_init__(self) -> None:
        if not self.raw_answer.strip():
            raise ValueError("raw_answer must be non-empty")
        if (self.rephrased_answer is not None) != (self.rephrase_status is RephraseStatus.OK):
            raise ValueError("rephrased_answer present iff rephrase_status is ok")


def answer_pipeline(
    query: str,
    rules: NormalizationRuleSet,
    gen_cfg: ProviderConfig,
    reph_cfg: ProviderConfig | None,
    rephrase_enabled: bool = True,
) -> AnswerBundle:
    """Normalize the query, generate an answer, optionally rephrase it.

    Generation failures propagate as ProviderError; rephrase failures only
    set a fallback status.
    """
    if not query.strip():
        raise ValueError("query must be non-empty")
    normalized = normalize_text(query, rules)

    start = time.perf_counter()
    raw_answer = generate_answer(normalized, gen_cfg)
    latency_generate = time.perf_counter() - start

    rephrased = None
    status = RephraseStatus.SKIPPED
    latency_rephrase = None
    if rephrase_enabled and reph_cfg is not None:
        start = time.perf_counter()
        rephrased, status = rephrase(raw_answer, reph_cfg)
        latency_rephrase = time.perf_counter() - start

    return AnswerBundle(
        query_normalized=normalized,
        raw_answer=raw_answer,
        rephrased_answer=rephrased,
        rephrase_status=status,
        latency_generate=latency_generate,
        latency_rephrase=latency_rephrase,
    )


def probe_provider(cfg: ProviderConfig, timeout: float = 1.0) -> bool:
    """Reachability check: any HTTP response within the time box counts.
    Stub providers are reachable when their fixture file loads."""
    if cfg.is_stub:
        try:
            _stub_lookup(cfg, "__probe__")
        except ProviderStatusError:
            return True
        except ProviderError:
            return False
        return True
    try:
        httpx.get(cfg.base_url, timeout=timeout)
    except httpx.HTTPError:
        return False
    return True


def default_stub_config(kind: str) -> ProviderConfig:
    """ProviderConfig for the packaged fixture stubs; kind is "generate"
    or "rephrase"."""
    names = {"generate": "stub_generation.jsonl", "rephrase": "stub_rephrase.jsonl"}
    if kind not in names:
        raise ValueError(f"unknown stub kind {kind!r}")
    path = resources.files("agriqa") / "data" / names[kind]
    return ProviderConfig(base_url=f"stub:{path}", model_name=f"stub-{kind}")
