"""Engine configuration via dataclass + YAML loading."""

import os
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Optional

import yaml

from .errors import ConfigError

REPORT_FORMATS = ("text", "json")


@dataclass
class SearchConfig:
    # None means 2 * maxdeg(s) + 2
    degree_bound: Optional[int] = None
    jet_order: int = 4


@dataclass
class ReportConfig:
    format: str = "text"


@dataclass
class EngineConfig:
    search: SearchConfig = field(default_factory=SearchConfig)
    report: ReportConfig = field(default_factory=ReportConfig)
    workers: int = 1

    def validate(self):
        bound = self.search.degree_bound
        if bound is not None and (not _is_int(bound) or bound < 0):
            raise ConfigError(f"search.degree_bound must be a non-negative integer, got {bound!r}")
        if not _is_int(self.search.jet_order) or self.search.jet_order < 0:
            raise ConfigError(f"search.jet_order must be a non-negative integer, got {self.search.jet_order!r}")
        if not _is_int(self.workers) or self.workers < 1:
            raise ConfigError(f"workers must be a positive integer, got {self.workers!r}")
        if self.report.format not in REPORT_FORMATS:
            raise ConfigError(f"report.format must be one of {', '.join(REPORT_FORMATS)}, got {self.report.format!r}")


def _is_int(value) -> bool:
    return isinstance(value, int) and not isinstance(value, bool)


def _section(data: dict, name: str, cls):
    raw = data.pop(name, {}) or {}
    if not isinstance(raw, dict):
        raise ConfigError(f"{name} must be a mapping")
    known = {f.name for f in fields(cls)}
    unknown = sorted(set(raw) - known)
    if unknown:
        raise ConfigError(f"unknown keys in {name}: {', '.join(unknown)}")
    return cls(**raw)


def load_config(config_path: Optional[Path] = None, **overrides) -> EngineConfig:
    """Load config from YAML file, with environment and CLI overrides applied on top."""
    if config_path is None and os.environ.get("DG_ATIYAH_CONFIG"):
        config_path = Path(os.environ["DG_ATIYAH_CONFIG"])
    data = {}
    if config_path is not None:
        if not config_path.exists():
            raise ConfigError(f"config file not found: {config_path}")
        with open(config_path, encoding="utf-8") as f:
            try:
                data = yaml.safe_load(f) or {}
            except yaml.YAMLError as exc:
                raise ConfigError(f"{config_path}: {exc}") from exc
        if not isinstance(data, dict):
            raise ConfigError(f"{config_path}: top level must be a mapping")
        data = dict(data)

    search = _section(data, "search", SearchConfig)
    report = _section(data, "report", ReportConfig)
    workers = data.pop("workers", None)
    if data:
        raise ConfigError(f"unknown config keys: {', '.join(sorted(data))}")

    # workers: YAML > env var
    if workers is None:
        env_workers = os.environ.get("DG_ATIYAH_WORKERS", "")
        if env_workers:
            try:
                workers = int(env_workers)
            except ValueError:
                raise ConfigError(f"DG_ATIYAH_WORKERS must be an integer, got {env_workers!r}") from None
    config = EngineConfig(search=search, report=report, workers=1 if workers is None else workers)

    # CLI overrides take precedence
    for key in ("degree_bound", "jet_order"):
        val = overrides.get(key)
        if val is not None:
            setattr(config.search, key, val)
    if overrides.get("format") is not None:
        config.report.format = overrides["format"]
    if overrides.get("workers") is not None:
        config.workers = overrides["workers"]

    config.validate()
    return config
