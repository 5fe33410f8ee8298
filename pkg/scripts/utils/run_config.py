#!/usr/bin/env python3
"""
Settings and run configuration utilities.
Loads config/settings.yaml, applies environment and command-line overrides,
and reads the JSON input files every subcommand consumes.

Environment variables:
    BOOKTOR_MAX_GROUP_ORDER  - default cap on |G|
    BOOKTOR_MAX_DEGREE       - default cap on permutation degree
    BOOKTOR_MAX_MINORS       - default cap on gcd-of-minors matrix dimension
    BOOKTOR_WORKERS          - default number of tower workers
"""

import json
import os
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any, Optional

import yaml

from scripts.utils.errors import MalformedInputError

_ENV_OVERRIDES = {
    "max_group_order": "BOOKTOR_MAX_GROUP_ORDER",
    "max_degree": "BOOKTOR_MAX_DEGREE",
    "max_minor_dimension": "BOOKTOR_MAX_MINORS",
}

_FALLBACK_CAPS = {
    "max_group_order": 1_000_000,
    "max_degree": 4096,
    "max_minor_dimension": 8,
}


def get_project_root() -> Path:
    """Get the project root directory."""
    # Navigate up from scripts/utils to project root
    current = Path(__file__).resolve()
    return current.parent.parent.parent


def get_config_path() -> Path:
    """Get the config directory path."""
    return get_project_root() / "config"


def get_settings() -> dict:
    """Load global settings from config/settings.yaml."""
    settings_path = get_config_path() / "settings.yaml"
    if not settings_path.exists():
        raise FileNotFoundError(f"Settings file not found: {settings_path}")
    with open(settings_path, "r", encoding="utf-8") as f:
        return yaml.safe_load(f) or {}


def get_data_path() -> Path:
    """Get the directory holding the sample books, quotients and towers."""
    return get_project_root() / "data"


def load_json(path: Path) -> Any:
    """Read a JSON input file, turning syntax errors into MalformedInputError."""
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"Input file not found: {path}")
    with open(path, "r", encoding="utf-8") as f:
        try:
            return json.load(f)
        except json.JSONDecodeError as e:
            raise MalformedInputError(f"{path}: invalid JSON ({e})") from e


def _positive_int(name: str, value: Any) -> int:
    try:
        number = int(value)
    except (TypeError, ValueError):
        raise MalformedInputError(f"{name} must be an integer, got {value!r}")
    if number <= 0:
        raise MalformedInputError(f"{name} must be positive, got {number}")
    return number


@dataclass(frozen=True)
class Caps:
    """Desk-scale limits shared by every computation."""
    max_group_order: int = _FALLBACK_CAPS["max_group_order"]
    max_degree: int = _FALLBACK_CAPS["max_degree"]
    max_minor_dimension: int = _FALLBACK_CAPS["max_minor_dimension"]

    @classmethod
    def resolve(cls, overrides: Optional[dict] = None, settings: Optional[dict] = None) -> "Caps":
        """Build caps from settings.yaml, then environment, then explicit overrides."""
        if settings is None:
            try:
                settings = get_settings()
            except FileNotFoundError:
                settings = {}
        values = dict(_FALLBACK_CAPS)
        values.update(settings.get("caps", {}) or {})
        for key, env_name in _ENV_OVERRIDES.items():
            if os.environ.get(env_name):
                values[key] = os.environ[env_name]
        for key, value in (overrides or {}).items():
            if value is not None:
                values[key] = value
        return cls(**{key: _positive_int(key, values[key]) for key in _FALLBACK_CAPS})


def default_workers(settings: Optional[dict] = None) -> int:
    """Number of tower workers: BOOKTOR_WORKERS, else settings.yaml, else 1."""
    if os.environ.get("BOOKTOR_WORKERS"):
        return _positive_int("BOOKTOR_WORKERS", os.environ["BOOKTOR_WORKERS"])
    settings = settings if settings is not None else get_settings()
    return _positive_int("tower.workers", settings.get("tower", {}).get("workers", 1))


def metabelian_settings(settings: Optional[dict] = None) -> tuple[int, Fraction]:
    """Return (bracket digits, relative tolerance) for the metabelian check."""
    settings = settings if settings is not None else get_settings()
    section = settings.get("metabelian", {}) or {}
    digits = _positive_int("metabelian.bracket_digits", section.get("bracket_digits", 12))
    tolerance = Fraction(str(section.get("tolerance", "1/50")))
    return digits, tolerance


@dataclass(frozen=True)
class RunConfig:
    """Everything a subcommand needs, resolved once from argv."""
    subcommand: str
    inputs: dict = field(default_factory=dict)
    caps: Caps = field(default_factory=Caps)
    oracle: bool = False
    output_path: Optional[Path] = None
    output_format: str = "json"
    workers: int = 1

    def __post_init__(self):
        if self.output_format not in ("json", "table", "csv"):
            raise MalformedInputError(f"Unknown output format: {self.output_format}")
        for name, path in self.inputs.items():
            if path is not None and not Path(path).exists():
                raise FileNotFoundError(f"--{name} file not found: {path}")
