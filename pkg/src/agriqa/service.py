"""HTTP query-resolution service.

Exposes the answer pipeline to clients: POST /v1/ask runs
normalize -> generate -> rephrase and returns both answer variants;
GET /v1/history pages the append-only query log; GET /v1/health probes
provider reachability. Rephrase-provider failures never fail a request.
"""

from __future__ import annotations

import json
import os
import threading
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from fastapi import FastAPI, HTTPException, Request
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from .config import AppConfig
from .modelgw import ProviderError, answer_pipeline, probe_provider
from .normalize import NormalizationRuleSet, default_ruleset, load_ruleset

MAX_QUERY_CHARS = 2000
MAX_HISTORY_LIMIT = 1000

_B32 = "0123456789ABCDEFGHJKMNPQRSTVWXYZ"  # Crockford alphabet
_ulid_lock = threading.Lock()
_ulid_last = 0


def new_request_id() -> str:
    """ULID-style id: 48-bit ms timestamp + 80 random bits, base32.
    Monotonic within the process, so lexicographic order is creation order."""
    global _ulid_last
    value = (int(time.time() * 1000) << 80) | int.from_bytes(os.urandom(10), "big")
    with _ulid_lock:
        if value <= _ulid_last:
            value = _ulid_last + 1
        _ulid_last = value
    chars = []
    for _ in range(26):
        chars.append(_B32[value & 0x1F])
        value >>= 5
    return "".join(reversed(chars))


class AskMetadata(BaseModel):
    crop: Optional[str] = None
    sector: Optional[str] = None
    season: Optional[str] = None


class AskRequest(BaseModel):
    query: str
    rephrase: bool = True
    metadata: Optional[AskMetadata] = None


class QueryLog:
    """Append-only JSON Lines log, single writer, fsynced per append.

    The in-memory view mirrors the file, so history responses are exactly
    a replay of the log.
    """

    def __init__(self, path: str | Path):
        self.path = Path(path)
        self._lock = threading.Lock()
        self._entries: list[dict] = []
        if self.path.exists():
            with self.path.open(encoding="utf-8") as fh:
                for line in fh:
                    line = line.strip()
                    if line:
                        self._entries.append(json.loads(line))
        self.path.parent.mkdir(parents=True, exist_ok=True)
        self._fh = self.path.open("a", encoding="utf-8")

    def append(self, entry: dict) -> None:
        with self._lock:
            self._fh.write(json.dumps(entry, ensure_ascii=False) + "\n")
            self._fh.flush()
            os.fsync(self._fh.fileno())
            self._entries.append(entry)

    def newest(self, limit: int) -> list[dict]:
        with self._lock:
            return list(reversed(self._entries[-limit:]))

    def __len__(self) -> int:
        with self._lock:
            return len(self._entries)

    def close(self) -> None:
        with self._lock:
            self._fh.close()


@dataclass
class _Bucket:
    tokens: float
    stamp: float


class RateLimiter:
    """Token bucket per client IP: sustained ``rate``/s with ``burst``
    capacity. rate <= 0 disables limiting."""

    def __init__(self, rate: float, burst: int):
        self.rate = rate
        self.burst = burst
        self._buckets: dict[str, _Bucket] = {}
        self._lock = threading.Lock()

    def allow(self, client: str) -> bool:
        if self.rate <= 0:
            return True
        now = time.monotonic()
        with self._lock:
            bucket = self._buckets.get(client)
            if bucket is None:
                bucket = _Bucket(tokens=float(self.burst), stamp=now)
                self._buckets[client] = bucket
            bucket.tokens = min(self.burst, bucket.tokens + (now - bucket.stamp) * self.rate)
            bucket.stamp = now
            if bucket.tokens < 1.0:
                return False
            bucket.tokens -= 1.0
            return True


@dataclass
class ServiceState:
    config: AppConfig
    rules: NormalizationRuleSet
    log: QueryLog
    limiter: RateLimiter = field(init=False)

    def __post_init__(self) -> None:
        self.limiter = RateLimiter(self.config.rate_limit_per_s, self.config.rate_limit_burst)


def create_app(config: AppConfig) -> FastAPI:
    rules = load_ruleset(config.rules_dir) if config.rules_dir else default_ruleset()
    state = ServiceState(config=config, rules=rules, log=QueryLog(config.log_path))

    app = FastAPI(title="agriqa", version="0.1.0")
    app.state.agriqa = state
    app.add_middleware(
        CORSMiddleware,
        allow_origins=list(config.cors_origins),
        allow_methods=["*"],
        allow_headers=["*"],
    )

    @app.exception_handler(RequestValidationError)
    async def _bad_request(request: Request, exc: RequestValidationError):
        return JSONResponse(status_code=400, content={"detail": str(exc.errors()[:3])})

    @app.post("/v1/ask")
    def ask(body: AskRequest, request: Request):
        client = request.client.host if request.client else "unknown"
        if not state.limiter.allow(client):
            raise HTTPException(status_code=429, detail="rate limit exceeded")
        query = body.query.strip()
        if not query:
            raise HTTPException(status_code=400, detail="query must be non-empty")
        if len(body.query) > MAX_QUERY_CHARS:
            raise HTTPException(
                status_code=400, detail=f"query exceeds {MAX_QUERY_CHARS} characters"
            )
        try:
            bundle = answer_pipeline(
                query,
                state.rules,
                config.gen,
                config.rephrase,
                rephrase_enabled=body.rephrase,
            )
        except ProviderError as exc:
            raise HTTPException(status_code=502, detail=f"generation failed: {exc}")

        response = {
            "id": new_request_id(),
            "normalized_query": bundle.query_normalized,
            "raw_answer": bundle.raw_answer,
            "rephrased_answer": bundle.rephrased_answer,
            "rephrase_status": bundle.rephrase_status.value,
            "timings": {
                "generate_ms": round(bundle.latency_generate * 1000.0, 3),
                "rephrase_ms": (
                    round(bundle.latency_rephrase * 1000.0, 3)
                    if bundle.latency_rephrase is not None
                    else None
                ),
            },
        }
        state.log.append(
            {
                "id": response["id"],
                "timestamp": time.strftime("%Y-%m-%dT%H:%M:%S", time.gmtime())
                + f".{int(time.time() * 1000) % 1000:03d}Z",
                "request": body.model_dump(),
                "response": response,
                "models": {
                    "generate": config.gen.model_name,
                    "rephrase": config.rephrase.model_name,
                },
            }
        )
        return response

    @app.get("/v1/history")
    def history(limit: int = 50):
        if not 1 <= limit <= MAX_HISTORY_LIMIT:
            raise HTTPException(
                status_code=400, detail=f"limit must be in 1..{MAX_HISTORY_LIMIT}"
            )
        return state.log.newest(limit)

    @app.get("/v1/health")
    def health():
        generate_ok = probe_provider(config.gen, timeout=1.0)
        rephrase_ok = probe_provider(config.rephrase, timeout=1.0)
        if generate_ok and rephrase_ok:
            status = "ok"
        elif generate_ok or rephrase_ok:
            status = "degraded"
        else:
            status = "down"
        return {
            "status": status,
            "providers": {
                "generate": "ok" if generate_ok else "unreachable",
                "rephrase": "ok" if rephrase_ok else "unreachable",
            },
        }

    return app


def run_service(config: AppConfig) -> None:
    """Blocking uvicorn run on config.addr."""
    import uvicorn

    host, _, port = config.addr.rpartition(":")
    app = create_app(config)
    uvicorn.run(app, host=host or "127.0.0.1", port=int(port))
