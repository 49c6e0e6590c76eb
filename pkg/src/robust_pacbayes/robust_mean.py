"""Scaled soft-truncated mean estimator and its centered two-stage variant."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np

from .errors import ArgumentError, ConfigurationError
from .trunc import CATONI_GIULINI, TruncationFn, psi

__all__ = [
    "RobustMeanConfig",
    "EstimateReport",
    "truncated_mean",
    "select_scale",
    "deviation_radius",
    "estimate",
    "estimate_centered",
    "empirical_m2_bound",
]


@dataclass(frozen=True)
class RobustMeanConfig:
    """Confidence level, second-moment bound and truncation function.

    ``m2_bound`` must upper-bound ``E x**2`` for the deviation guarantee to
    hold; it is never estimated silently.
    """

    delta: float
    m2_bound: float
    trunc: TruncationFn = CATONI_GIULINI

    def __post_init__(self):
        if not (0.0 < self.delta < 1.0):
            raise ConfigurationError(f"delta must lie in (0, 1), got {self.delta!r}")
        if not (self.m2_bound > 0.0 and math.isfinite(self.m2_bound)):
            raise ConfigurationError(f"m2_bound must be positive and finite, got {self.m2_bound!r}")

    @property
    def log_inv_delta(self) -> float:
        return math.log(1.0 / self.delta)


@dataclass
class EstimateReport:
    estimate: float
    scale_s: float
    radius: float
    n_used: int
    centered: bool = False
    shift: Optional[float] = None
    epsilon_k: Optional[float] = None
    m2_used: float = float("nan")
    delta: float = float("nan")
    # probability that |estimate - E x| > radius is at most this
    failure_probability: float = float("nan")
    heuristic_m2: bool = False
    extra: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return asdict(self)


def _as_data(data) -> np.ndarray:
    x = np.asarray(data, dtype=float).ravel()
    if x.size == 0:
        raise ArgumentError("data must be nonempty")
    if not np.all(np.isfinite(x)):
        raise ArgumentError("data must be finite")
    return x


def truncated_mean(data, s: float, trunc: TruncationFn = CATONI_GIULINI) -> float:
    """Return ``(s / n) * sum(psi(x_i / s))``.

    Parameters
    ----------
    data : array_like
        Observations, nonempty.
    s : float
        Positive re-scaling parameter. Large ``s`` approaches the sample mean,
        small ``s`` only counts signs.
    trunc : TruncationFn
    """
    x = _as_data(data)
    if not (s > 0.0 and math.isfinite(s)):
        raise ArgumentError(f"scale s must be positive and finite, got {s!r}")
    return float(s * np.mean(psi(trunc, x / s)))


def select_scale(n: int, cfg: RobustMeanConfig) -> float:
    """Scale ``s = sqrt(n * m2_bound / (2 log(1/delta)))`` balancing bias and tails."""
    if n < 1:
        raise ArgumentError("n must be a positive integer")
    return math.sqrt(n * cfg.m2_bound / (2.0 * cfg.log_inv_delta))


def deviation_radius(n: int, m2: float, delta: float) -> float:
    """``sqrt(2 m2 log(1/delta) / n)``; holds with probability at least ``1 - 2 delta``."""
    return math.sqrt(2.0 * m2 * math.log(1.0 / delta) / n)


def estimate(data, cfg: RobustMeanConfig) -> EstimateReport:
    """Robust mean with the default scale and its deviation radius.

    With probability at least ``1 - 2 * cfg.delta``, ``|estimate - E x| <= radius``
    whenever ``cfg.m2_bound >= E x**2``.
    """
    x = _as_data(data)
    n = x.size
    s = select_scale(n, cfg)
    return EstimateReport(
        estimate=truncated_mean(x, s, cfg.trunc),
        scale_s=s,
        radius=deviation_radius(n, cfg.m2_bound, cfg.delta),
        n_used=n,
        centered=False,
        m2_used=cfg.m2_bound,
        delta=cfg.delta,
        failure_probability=min(1.0, 2.0 * cfg.delta),
    )


def estimate_centered(data, cfg: RobustMeanConfig, k: Optional[int] = None,
                      var_bound: Optional[float] = None) -> EstimateReport:
    """Two-stage estimator that removes the dependence on the location.

    The first ``k`` points (in the given order) produce a crude location
    ``shift`` using ``cfg.m2_bound``; the remaining ``n - k`` points are
    shifted by it and re-estimated with second-moment bound
    ``var_bound + epsilon_k**2``. The returned estimate is the second-stage
    output plus ``shift``.

    The deviation ``radius`` holds with probability at least ``1 - 4 delta``
    (union of the two stages), recorded as ``failure_probability``.

    Parameters
    ----------
    k : int, optional
        Size of the centering subsample, ``0 < k < n``. Defaults to ``n // 2``.
    var_bound : float
        Upper bound on ``Var x``. Required.
    """
    x = _as_data(data)
    n = x.size
    if k is None:
        k = n // 2
    if not (0 < k < n):
        raise ArgumentError(f"centering split k must satisfy 0 < k < n = {n}, got {k}")
    if var_bound is None or not (var_bound > 0.0 and math.isfinite(var_bound)):
        raise ArgumentError("var_bound must be a positive finite upper bound on Var x")

    log_inv = cfg.log_inv_delta
    s_bar = math.sqrt(k * cfg.m2_bound / (2.0 * log_inv))
    shift = truncated_mean(x[:k], s_bar, cfg.trunc)
    eps_k = deviation_radius(k, cfg.m2_bound, cfg.delta)

    m2_main = var_bound + eps_k**2
    m = n - k
    s = math.sqrt(m * m2_main / (2.0 * log_inv))
    inner = truncated_mean(x[k:] - shift, s, cfg.trunc)
    return EstimateReport(
        estimate=inner + shift,
        scale_s=s,
        radius=deviation_radius(m, m2_main, cfg.delta),
        n_used=m,
        centered=True,
        shift=shift,
        epsilon_k=eps_k,
        m2_used=m2_main,
        delta=cfg.delta,
        failure_probability=min(1.0, 4.0 * cfg.delta),
        extra={"k": k, "shift_scale": s_bar},
    )


def empirical_m2_bound(data, inflation: float = 1.5) -> float:
    """Heuristic plug-in for ``m2_bound``: inflated empirical second moment.

    Not a valid upper bound in general; results computed with it carry no
    guarantee. Mark reports produced with it via ``heuristic_m2=True``.
    """
    x = _as_data(data)
    if inflation < 1.0:
        raise ArgumentError("inflation factor must be >= 1")
    m2 = float(np.mean(x * x)) * inflation
    # all-zero data would give a zero bound, which the scale rule cannot use
    return m2 if m2 > 0.0 else np.finfo(float).tiny
