"""Service configuration: JSON file + environment variable + flag overrides."""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field, fields
from pathlib import Path

from ..errors import BadConfig

CONFIG_ENV_VAR = "PANACEA_CONFIG"


@dataclass
class ServiceConfig:
    data_dir: str = "data"
    host: str = "127.0.0.1"
    port: int = 8765
    slots: int = 1
    ttl_seconds: float = 3600.0
    queue_bound: int = 1000
    encoder_dim: int = 256
    nlisan_checkpoint: str = ""
    bigcn_checkpoint: str = ""
    admin_token: str = "change-me"
    ui_dir: str = ""
    n_trees: int = 10
    lda_topics: int = 3
    lda_iters: int = 200
    seed: int = 7

    @classmethod
    def field_names(cls) -> set[str]:
        return {f.name for f in fields(cls)}


def load_config(path: str | None = None, overrides: dict | None = None) -> ServiceConfig:
    """Resolve config from an explicit path, $PANACEA_CONFIG, or defaults.

    ``overrides`` (typically CLI flags) win over the file.
    """
    config = ServiceConfig()
    source = path or os.environ.get(CONFIG_ENV_VAR)
    if source:
        p = Path(source)
        if not p.exists():
            raise BadConfig(f"config file not found: {source}")
        try:
            payload = json.loads(p.read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise BadConfig(f"config is not valid JSON: {exc}") from exc
        unknown = set(payload) - ServiceConfig.field_names()
        if unknown:
            raise BadConfig(f"unknown config keys: {sorted(unknown)}")
        for key, value in payload.items():
            setattr(config, key, value)
    for key, value in (overrides or {}).items():
        if value is None:
            continue
        if key not in ServiceConfig.field_names():
            raise BadConfig(f"unknown config key: {key}")
        setattr(config, key, value)
    if config.slots < 1:
        raise BadConfig("slots must be >= 1")
    if config.queue_bound < 1:
        raise BadConfig("queue_bound must be >= 1")
    return config
