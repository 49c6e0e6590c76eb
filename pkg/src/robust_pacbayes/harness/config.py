"""Experiment configuration.

A run is described by one JSON document. CLI flags override the matching
top-level fields (``seed``, ``trials``, ``n``, ``delta``, ``out``), which in
turn override the defaults below.
"""

from __future__ import annotations

import enum
import hashlib
import json
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Optional

import numpy as np

from ..errors import ConfigurationError
from ..synthetic import DistributionSpec, LearningProblem, LossKind

__all__ = ["ExperimentKind", "ExperimentConfig", "parse_distribution", "parse_problem"]


class ExperimentKind(str, enum.Enum):
    COVERAGE = "coverage"
    CENTERED_COVERAGE = "centered_coverage"
    LEMMA31 = "lemma31"
    CHERNOFF = "chernoff"
    COUNTABLE_BOUND = "countable_bound"
    BOUNDED_LOSS_BOUND = "bounded_loss_bound"
    UNCOUNTABLE_BOUND = "uncountable_bound"
    GIBBS_COMPARE = "gibbs_compare"
    IDENTITY_CHECK = "identity_check"
    COMPARE = "compare"


def parse_distribution(d) -> DistributionSpec:
    """Build a distribution from a config dict.

    Besides the fields of :meth:`DistributionSpec.to_dict`, three
    conveniences are applied in order: ``"center": true`` shifts to mean
    zero, ``"second_moment": v`` rescales so ``E x^2 = v``, and
    ``"offset": c`` adds ``c`` afterwards.
    """
    if isinstance(d, DistributionSpec):
        return d
    if not isinstance(d, dict) or "family" not in d:
        raise ConfigurationError("distribution must be an object with a 'family' field")
    try:
        dist = DistributionSpec.from_dict({k: v for k, v in d.items()
                                           if k in ("family", "params", "shift", "scale")})
    except (KeyError, ValueError) as exc:
        raise ConfigurationError(f"invalid distribution {d!r}: {exc}") from exc
    if d.get("center"):
        dist = dist.centered()
    if "second_moment" in d:
        dist = dist.with_second_moment(float(d["second_moment"]))
    if "offset" in d:
        dist = dist.shifted(float(d["offset"]))
    return dist


def parse_problem(d) -> LearningProblem:
    """``{"data_dist": ..., "loss_kind": ..., "grid": [..] | {"start", "stop", "num"}}``."""
    if isinstance(d, LearningProblem):
        return d
    try:
        grid = d["grid"]
        if isinstance(grid, dict):
            grid = np.linspace(float(grid["start"]), float(grid["stop"]), int(grid["num"]))
        return LearningProblem(parse_distribution(d["data_dist"]), LossKind(d["loss_kind"]),
                               tuple(float(g) for g in grid),
                               mc_samples=int(d.get("mc_samples", 10**7)))
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigurationError(f"invalid problem {d!r}: {exc}") from exc


@dataclass
class ExperimentConfig:
    experiment: ExperimentKind
    trials: int = 1000
    n: int = 100
    delta: float = 0.05
    seed: int = 0
    distribution: Optional[dict] = None
    problem: Optional[dict] = None
    params: dict = field(default_factory=dict)
    out: Optional[str] = None
    workers: int = 1

    def __post_init__(self):
        try:
            self.experiment = ExperimentKind(self.experiment)
        except ValueError as exc:
            raise ConfigurationError(f"unknown experiment {self.experiment!r}") from exc
        if int(self.trials) < 1:
            raise ConfigurationError("trials must be >= 1")
        if int(self.n) < 1:
            raise ConfigurationError("n must be >= 1")
        if not (0.0 < float(self.delta) < 1.0):
            raise ConfigurationError("delta must lie in (0, 1)")
        self.trials, self.n, self.seed = int(self.trials), int(self.n), int(self.seed)
        self.delta = float(self.delta)
        if self.distribution is not None:
            parse_distribution(self.distribution)
        if self.problem is not None:
            parse_problem(self.problem)

    # -- io ---------------------------------------------------------------

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(d) - known
        if unknown:
            raise ConfigurationError(f"unknown config fields: {sorted(unknown)}")
        if "experiment" not in d:
            raise ConfigurationError("config needs an 'experiment' field")
        return cls(**d)

    @classmethod
    def from_json(cls, path, **overrides) -> "ExperimentConfig":
        try:
            with open(path, encoding="utf-8") as fh:
                d = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigurationError(f"{path}: invalid JSON: {exc}") from exc
        d.update({k: v for k, v in overrides.items() if v is not None})
        return cls.from_dict(d)

    def to_dict(self) -> dict:
        return {
            "experiment": self.experiment.value,
            "trials": self.trials,
            "n": self.n,
            "delta": self.delta,
            "seed": self.seed,
            "distribution": self.distribution,
            "problem": self.problem,
            "params": self.params,
            "out": self.out,
            "workers": self.workers,
        }

    def config_hash(self) -> str:
        """Hash of every field that influences results (not ``out`` or ``workers``)."""
        d = self.to_dict()
        d.pop("out")
        d.pop("workers")
        return hashlib.sha256(json.dumps(d, sort_keys=True).encode()).hexdigest()[:16]

    def with_overrides(self, **kw: Any) -> "ExperimentConfig":
        return replace(self, **{k: v for k, v in kw.items() if v is not None})

    @property
    def out_dir(self) -> Optional[Path]:
        return Path(self.out) if self.out else None
