"""Run configuration: defaults, flat key=value files and command-line overrides."""

from __future__ import annotations

from dataclasses import dataclass, fields, replace
from pathlib import Path

from .quadrature import DEFAULT_NODES
from .symbols import DEFAULT_DEGREE_CAP

FORMATS = ("json", "csv", "pretty")


@dataclass(frozen=True)
class Config:
    hbar: float = 1.0
    cutoff: int | None = None  # None means choose automatically
    degree_cap: int = DEFAULT_DEGREE_CAP
    nodes: int = DEFAULT_NODES
    format: str = "pretty"
    seed: int = 0

    def __post_init__(self):
        if not self.hbar > 0:
            raise ValueError(f"hbar must be positive, got {self.hbar}")
        if self.cutoff is not None and self.cutoff < 1:
            raise ValueError(f"cutoff must be positive, got {self.cutoff}")
        if self.degree_cap < 1:
            raise ValueError(f"degree_cap must be positive, got {self.degree_cap}")
        if self.nodes < 1:
            raise ValueError(f"nodes must be positive, got {self.nodes}")
        if self.seed < 0:
            raise ValueError(f"seed must be nonnegative, got {self.seed}")
        if self.format not in FORMATS:
            raise ValueError(f"format must be one of {', '.join(FORMATS)}, got {self.format!r}")

    def updated(self, **overrides) -> "Config":
        return replace(self, **{k: coerce_value(k, v) for k, v in overrides.items()})


_KEYS = {f.name for f in fields(Config)}
_ALIASES = {"degreecap": "degree_cap", "degree-cap": "degree_cap"}


def _key(raw: str) -> str:
    key = raw.strip().lower()
    key = _ALIASES.get(key, key)
    if key not in _KEYS:
        raise ValueError(f"unknown config key {raw.strip()!r}; allowed: {', '.join(sorted(_KEYS))}")
    return key


def coerce_value(key: str, value):
    if not isinstance(value, str):
        return value
    text = value.strip()
    if key == "hbar":
        return float(text)
    if key == "cutoff":
        return None if text.lower() == "auto" else int(text)
    if key in ("degree_cap", "nodes", "seed"):
        return int(text)
    return text


def parse_config_text(text: str) -> dict:
    """Flat ``key = value`` lines; '#' starts a comment."""
    out = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ValueError(f"line {lineno}: expected 'key = value', got {line!r}")
        key = _key(key)
        try:
            out[key] = coerce_value(key, value)
        except ValueError as exc:
            raise ValueError(f"line {lineno}: bad value for {key}: {exc}") from None
    return out


def load_config(path: str | Path | None = None, **overrides) -> Config:
    """Defaults, then the file (if any), then explicit overrides."""
    values = {}
    if path is not None:
        values.update(parse_config_text(Path(path).read_text()))
    values.update({_key(k): coerce_value(_key(k), v) for k, v in overrides.items() if v is not None})
    return Config(**values)
