"""Configuration loading for the CLI and service.

Config files are flat key-value INI sections (see README for the
grammar). Settings resolve with precedence: built-in defaults, then the
config file, then command-line flags, then environment variables.
Provider secrets come only from the environment, never from files.
"""

from __future__ import annotations

import configparser
import hashlib
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping

from .modelgw import ProviderConfig, default_stub_config

ENV_GEN_URL = "AGRIQA_GEN_URL"
ENV_GEN_TOKEN = "AGRIQA_GEN_TOKEN"
ENV_REPHRASE_URL = "AGRIQA_REPHRASE_URL"
ENV_REPHRASE_TOKEN = "AGRIQA_REPHRASE_TOKEN"
ENV_ADDR = "AGRIQA_ADDR"


@dataclass
class AppConfig:
    """Resolved settings for one run."""

    schema_map: dict[str, str] = field(default_factory=dict)
    rules_dir: Path | None = None
    gen: ProviderConfig = field(default_factory=lambda: default_stub_config("generate"))
    rephrase: ProviderConfig = field(default_factory=lambda: default_stub_config("rephrase"))
    addr: str = "127.0.0.1:8080"
    log_path: Path = Path("agriqa_queries.jsonl")
    rate_limit_per_s: float = 10.0
    rate_limit_burst: int = 64
    cors_origins: tuple[str, ...] = ("*",)
    rephrase_default: bool = True
    config_hash: str = ""
    source_path: Path | None = None


def _provider_from_section(
    section: Mapping[str, str], prefix: str, fallback: ProviderConfig
) -> ProviderConfig:
    return ProviderConfig(
        base_url=section.get(f"{prefix}_url", fallback.base_url),
        model_name=section.get(f"{prefix}_model", fallback.model_name),
        timeout=float(section.get(f"{prefix}_timeout", fallback.timeout)),
        max_retries=int(section.get(f"{prefix}_max_retries", fallback.max_retries)),
        auth_token=fallback.auth_token,
    )


def config_file_hash(path: str | Path | None) -> str:
    data = Path(path).read_bytes() if path else b""
    return hashlib.sha256(data).hexdigest()


def load_config(
    path: str | Path | None = None,
    flags: Mapping[str, str] | None = None,
    env: Mapping[str, str] | None = None,
) -> AppConfig:
    """Resolve an AppConfig from file + flags + environment.

    ``flags`` may carry: addr, gen_url, rephrase_url, log_path, rules_dir.
    """
    flags = dict(flags or {})
    env = os.environ if env is None else env
    cfg = AppConfig(config_hash=config_file_hash(path))

    if path is not None:
        parser = configparser.ConfigParser()
        read = parser.read(path, encoding="utf-8")
        if not read:
            raise FileNotFoundError(f"config file not found: {path}")
        cfg.source_path = Path(path)

        if parser.has_section("corpus"):
            for key, value in parser.items("corpus"):
                if key.startswith("map."):
                    cfg.schema_map[key[4:]] = value
                elif key == "rules_dir":
                    cfg.rules_dir = Path(value)
        if parser.has_section("providers"):
            section = dict(parser.items("providers"))
            cfg.gen = _provider_from_section(section, "gen", cfg.gen)
            cfg.rephrase = _provider_from_section(section, "rephrase", cfg.rephrase)
        if parser.has_section("service"):
            section = dict(parser.items("service"))
            cfg.addr = section.get("addr", cfg.addr)
            cfg.log_path = Path(section.get("log_path", cfg.log_path))
            cfg.rate_limit_per_s = float(section.get("rate_limit_per_s", cfg.rate_limit_per_s))
            cfg.rate_limit_burst = int(section.get("rate_limit_burst", cfg.rate_limit_burst))
            if "cors_origins" in section:
                cfg.cors_origins = tuple(
                    origin.strip() for origin in section["cors_origins"].split(",")
                )
            if "rephrase_default" in section:
                cfg.rephrase_default = section["rephrase_default"].lower() in ("1", "true", "yes")

    if flags.get("rules_dir"):
        cfg.rules_dir = Path(flags["rules_dir"])
    if flags.get("log_path"):
        cfg.log_path = Path(flags["log_path"])
    if flags.get("addr"):
        cfg.addr = flags["addr"]
    if flags.get("gen_url"):
        cfg.gen = ProviderConfig(
            base_url=flags["gen_url"], model_name=cfg.gen.model_name,
            timeout=cfg.gen.timeout, max_retries=cfg.gen.max_retries,
        )
    if flags.get("rephrase_url"):
        cfg.rephrase = ProviderConfig(
            base_url=flags["rephrase_url"], model_name=cfg.rephrase.model_name,
            timeout=cfg.rephrase.timeout, max_retries=cfg.rephrase.max_retries,
        )

    # Environment wins; tokens only ever come from here.
    if env.get(ENV_ADDR):
        cfg.addr = env[ENV_ADDR]
    if env.get(ENV_GEN_URL):
        cfg.gen = ProviderConfig(
            base_url=env[ENV_GEN_URL], model_name=cfg.gen.model_name,
            timeout=cfg.gen.timeout, max_retries=cfg.gen.max_retries,
        )
    if env.get(ENV_REPHRASE_URL):
        cfg.rephrase = ProviderConfig(
            base_url=env[ENV_REPHRASE_URL], model_name=cfg.rephrase.model_name,
            timeout=cfg.rephrase.timeout, max_retries=cfg.rephrase.max_retries,
        )
    if env.get(ENV_GEN_TOKEN):
        cfg.gen = ProviderConfig(
            base_url=cfg.gen.base_url, model_name=cfg.gen.model_name,
            timeout=cfg.gen.timeout, max_retries=cfg.gen.max_retries,
            auth_token=env[ENV_GEN_TOKEN],
        )
    if env.get(ENV_REPHRASE_TOKEN):
        cfg.rephrase = ProviderConfig(
            base_url=cfg.rephrase.base_url, model_name=cfg.rephrase.model_name,
            timeout=cfg.rephrase.timeout, max_retries=cfg.rephrase.max_retries,
            auth_token=env[ENV_REPHRASE_TOKEN],
        )
    return cfg
