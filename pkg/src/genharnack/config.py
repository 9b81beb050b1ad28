"""Experiment configuration files."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, fields

from .drift import from_config as drift_from_config
from .errors import ConfigError

EXPERIMENTS = (
    "drift-check",
    "osgood",
    "harnack",
    "sharpness",
    "barrier",
    "levelsets",
    "px-solve",
    "px-inverse",
    "px-harnack",
    "suite",
)


@dataclass
class ExperimentConfig:
    """One experiment and its inputs.

    Attributes
    ----------
    experiment : str
        One of :data:`EXPERIMENTS`.
    drift : dict
        Drift description such as ``{"kind": "log_linear", "c": 1.0}``.
    constants : dict
        Numeric constants (``L``, ``L0``, ``sigma``, ``eps``, ``c0``, ``c_eps`` ...).
    tolerances : dict
        Named positive tolerances.
    grid : dict
        Grid description (``nodes``, ``lo``, ``hi`` ...).
    params : dict
        Experiment-specific parameters.
    output : dict
        ``{"dir": path}``; nothing is written when empty.
    seed : int or None
        Seed for any randomized sampling.
    """

    experiment: str
    drift: dict = field(default_factory=lambda: {"kind": "log_linear", "c": 1.0})
    constants: dict = field(default_factory=dict)
    tolerances: dict = field(default_factory=dict)
    grid: dict = field(default_factory=dict)
    params: dict = field(default_factory=dict)
    output: dict = field(default_factory=dict)
    seed: int | None = None

    def __post_init__(self):
        if self.experiment not in EXPERIMENTS:
            raise ConfigError(f"unknown experiment {self.experiment!r}; expected one of {', '.join(EXPERIMENTS)}")
        for name in ("drift", "constants", "tolerances", "grid", "params", "output"):
            if not isinstance(getattr(self, name), dict):
                raise ConfigError(f"field {name!r} must be an object")
        for key, val in self.tolerances.items():
            if not isinstance(val, (int, float)) or not val > 0 or not math.isfinite(val):
                raise ConfigError(f"tolerance {key!r} must be a positive number")
        if self.seed is not None and not isinstance(self.seed, int):
            raise ConfigError("seed must be an integer")
        try:
            drift_from_config(self.drift)
        except (ValueError, TypeError, KeyError) as exc:
            raise ConfigError(f"invalid drift: {exc}") from exc

    @classmethod
    def from_dict(cls, data) -> "ExperimentConfig":
        if not isinstance(data, dict) or not data:
            raise ConfigError("configuration must be a non-empty JSON object")
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown configuration fields: {sorted(unknown)}")
        if "experiment" not in data:
            raise ConfigError("configuration needs an 'experiment' field")
        return cls(**data)

    @classmethod
    def from_json(cls, text: str) -> "ExperimentConfig":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"configuration is not valid JSON: {exc}") from exc
        return cls.from_dict(data)

    @classmethod
    def load(cls, path) -> "ExperimentConfig":
        try:
            with open(path, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise ConfigError(f"cannot read configuration: {exc}") from exc
        return cls.from_json(text)

    def to_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2) + "\n"
