#!/usr/bin/env python3
"""
Configuration for the Bidegree Toolkit.

Settings are read from the environment once and passed down explicitly
wherever a caller wants to override them.
"""

import os
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Optional


APP_NAME = "Bidegree Toolkit"
VERSION = "0.1.0"

DEFAULT_MAX_NODES = 24
DEFAULT_MAX_STATES = 2_000_000


def _env_int(name: str, default: int) -> int:
    raw = os.environ.get(name)
    if raw is None or raw.strip() == "":
        return default
    try:
        value = int(raw)
    except ValueError:
        raise ValueError(f"{name} must be an integer, got {raw!r}")
    if value < 1:
        raise ValueError(f"{name} must be positive, got {value}")
    return value


@dataclass(frozen=True)
class Settings:
    """Runtime limits and output locations."""
    max_nodes: int = DEFAULT_MAX_NODES
    max_states: int = DEFAULT_MAX_STATES
    log_dir: Optional[Path] = None
    default_seed: int = 0

    @classmethod
    def from_env(cls) -> "Settings":
        log_dir = os.environ.get("BIDEGREE_LOG_DIR")
        return cls(
            max_nodes=_env_int("BIDEGREE_MAX_NODES", DEFAULT_MAX_NODES),
            max_states=_env_int("BIDEGREE_MAX_STATE", DEFAULT_MAX_STATES),
            log_dir=Path(log_dir) if log_dir else None,
            default_seed=int(os.environ.get("BIDEGREE_SEED", "0") or 0),
        )

    def with_overrides(self, **changes) -> "Settings":
        """Return a copy with the non-None keyword arguments applied."""
        return replace(self, **{k: v for k, v in changes.items() if v is not None})


_settings: Optional[Settings] = None


def get_settings() -> Settings:
    """Process-wide settings, loaded from the environment on first use."""
    global _settings
    if _settings is None:
        _settings = Settings.from_env()
    return _settings


def reset_settings(settings: Optional[Settings] = None) -> None:
    """Replace (or drop, when None) the cached settings. Used by tests and the CLI."""
    global _settings
    _settings = settings
