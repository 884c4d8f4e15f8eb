"""Run configuration: the free constants of the iteration plus plumbing knobs."""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, fields, replace
from fractions import Fraction
from pathlib import Path

from .errors import ConfigError

_NUMERIC = {"c", "c_prime", "c_slack", "c_inc", "c_p", "c_eta", "tolerance"}


@dataclass(frozen=True)
class RunConfig:
    c: float = 1 / 8           # eta in the iteration
    c_prime: float = 1 / 1024  # epsilon = c_prime * alpha^2
    c_slack: float = 4.0       # stands in for the O(eps) terms
    c_inc: float = 1 / 32      # expected per-step gain, used for the step cap
    c_p: float = 1.0
    c_eta: float = 0.25
    guard: int = 8
    seed: int = 0
    mode: str = "exhaustive"
    tolerance: float = 1e-9
    group_cap: int = 512
    max_retries: int = 8
    samples: int = 16
    n_samples: int = 64

    def __post_init__(self):
        for name in _NUMERIC:
            v = getattr(self, name)
            if not (isinstance(v, (int, float)) and math.isfinite(v) and v > 0):
                raise ConfigError(f"{name} must be a positive number, got {v!r}", key=name)
        if self.c > 1:
            raise ConfigError("c must lie in (0, 1]", key="c")
        if self.mode not in ("exhaustive", "montecarlo"):
            raise ConfigError(f"unknown mode {self.mode!r}", key="mode")
        for name in ("guard", "group_cap", "max_retries", "samples", "n_samples"):
            if getattr(self, name) < (0 if name in ("guard", "max_retries") else 1):
                raise ConfigError(f"{name} is out of range", key=name)

    def epsilon(self, alpha: float) -> float:
        return min(1.0, self.c_prime * alpha * alpha)

    def step_cap(self, alpha: float) -> int:
        return math.ceil(math.log(1 / alpha) / math.log1p(self.c_inc)) + self.guard

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "RunConfig":
        known = {f.name: f for f in fields(cls)}
        kw = {}
        for key, value in data.items():
            if key not in known:
                raise ConfigError(f"unknown config key {key!r}", key=key)
            kw[key] = _coerce(known[key].type, key, value)
        return cls(**kw)

    def with_(self, **kw) -> "RunConfig":
        return replace(self, **kw)


def _coerce(typ, key, value):
    if not isinstance(value, str):
        return value
    text = value.strip()
    try:
        if typ in ("int", int):
            return int(text, 0)
        if typ in ("float", float):
            return float(Fraction(text)) if "/" in text else float(text)
        return text
    except ValueError as exc:
        raise ConfigError(f"bad value for {key}: {value!r}", key=key) from exc


def parse_config_text(text: str) -> dict:
    out = {}
    for n, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {n}: expected key=value", line=n)
        k, v = line.split("=", 1)
        out[k.strip()] = v.strip()
    return out


def load_config(path: str | Path | None, overrides: dict | None = None) -> RunConfig:
    data = parse_config_text(Path(path).read_text()) if path else {}
    data.update(overrides or {})
    return RunConfig.from_dict(data)
