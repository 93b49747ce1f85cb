"""Experiment configuration: a dataclass, its JSON form and validation."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path

from ..psi import psi_kind

__all__ = ["ConfigError", "ExperimentConfig", "ESTIMATORS", "load_config"]

ESTIMATORS = ("rho", "rho_penalized", "mle", "grenander", "median", "least_squares")


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class ExperimentConfig:
    """One run of one registry entry.

    ``None`` for ``n``, ``reps`` or ``estimators`` means the experiment's
    default; ``params`` entries override the experiment's default parameters
    key by key.
    """

    experiment: str
    n: int | None = None
    reps: int | None = None
    seed: int = 20240917
    psi: tuple = ("psi1", "psi2")
    estimators: tuple | None = None
    params: dict = field(default_factory=dict)
    out_dir: str = "results"
    threads: int = 1

    def __post_init__(self):
        object.__setattr__(self, "psi", tuple(self.psi))
        if self.estimators is not None:
            object.__setattr__(self, "estimators", tuple(self.estimators))
        object.__setattr__(self, "params", dict(self.params))
        self.validate()

    def validate(self) -> None:
        if not isinstance(self.experiment, str) or not self.experiment:
            raise ConfigError("experiment must be a registry name")
        if self.n is not None and (not isinstance(self.n, int) or self.n < 1):
            raise ConfigError("n must be a positive integer")
        if self.reps is not None and (not isinstance(self.reps, int) or self.reps < 1):
            raise ConfigError("reps must be a positive integer")
        if not isinstance(self.seed, int) or self.seed < 0:
            raise ConfigError("seed must be a nonnegative integer")
        if not isinstance(self.threads, int) or self.threads < 1:
            raise ConfigError("threads must be a positive integer")
        if not self.psi:
            raise ConfigError("psi must name at least one kind")
        for p in self.psi:
            try:
                k = psi_kind(p)
            except ValueError as e:
                raise ConfigError(str(e)) from None
            if not k.bounded:
                raise ConfigError("rho-estimators need a bounded psi (psi1 or psi2)")
        if self.estimators is not None:
            bad = [e for e in self.estimators if e not in ESTIMATORS]
            if bad:
                raise ConfigError(f"unknown estimators {bad}; choose from {list(ESTIMATORS)}")

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        known = {f.name for f in fields(cls)}
        extra = set(d) - known
        if extra:
            raise ConfigError(f"unknown config keys {sorted(extra)}")
        if "experiment" not in d:
            raise ConfigError("config needs an 'experiment' entry")
        try:
            return cls(**d)
        except TypeError as e:
            raise ConfigError(str(e)) from None

    def to_dict(self) -> dict:
        d = asdict(self)
        d["psi"] = list(self.psi)
        d["estimators"] = None if self.estimators is None else list(self.estimators)
        return d

    def override(self, **kw) -> "ExperimentConfig":
        """Copy with the non-``None`` keyword values replaced."""
        return replace(self, **{k: v for k, v in kw.items() if v is not None})


def load_config(path) -> ExperimentConfig:
    p = Path(path)
    try:
        raw = json.loads(p.read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise ConfigError(f"config file {p} not found") from None
    except json.JSONDecodeError as e:
        raise ConfigError(f"config file {p} is not valid JSON: {e}") from None
    if not isinstance(raw, dict):
        raise ConfigError("config file must hold a JSON object")
    return ExperimentConfig.from_dict(raw)
