"""PAC-Bayes bounds built on the truncated risk estimator.

For a finite hypothesis class with loss matrix ``L[i, j] = l(h_j; z_i)`` the
robust risk estimate is the truncated mean of each column::

    R_psi(h) = (s / n) * sum_i psi(l(h; z_i) / s)

This module provides

* per-hypothesis bounds for countable classes (truncated estimator and the
  classical 0/1-loss bound),
* the bound on the Gibbs risk ``E_rho R`` valid uniformly over posteriors
  ``rho``, itemized into its additive terms,
* the robust optimal Gibbs posterior ``rho ~ pi exp(-sqrt(n) R_psi)`` that
  minimizes that bound, and the traditional ``pi exp(-n R_emp)`` posterior.

All expectations over ``rho`` and ``pi`` are exact weighted sums.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np

from .errors import ArgumentError, AssumptionViolation, CapabilityError, ConfigurationError
from .info import WeightVector, exponential_tilt, kl_divergence, log_partition
from .trunc import CATONI_GIULINI, TruncationFn, psi

__all__ = [
    "DELTA_MAX",
    "AnalyticTruth",
    "FiniteHypothesisClass",
    "BoundAssumptions",
    "BoundTable",
    "BoundReport",
    "robust_risks",
    "robust_risk_estimate",
    "countable_bound",
    "bounded_loss_bound",
    "prior_quality_term",
    "class_scale",
    "log_const_term",
    "o1n_term",
    "uncountable_bound",
    "robust_gibbs_posterior",
    "traditional_gibbs_posterior",
    "gibbs_objective",
    "gibbs_bound",
    "modified_change_of_measure",
]

# largest confidence parameter the Gibbs-risk bound allows
DELTA_MAX = math.exp(-1.0 / 9.0)


@dataclass
class AnalyticTruth:
    """Ground-truth risk and loss moments per hypothesis."""

    risk: np.ndarray
    m2: np.ndarray
    var: np.ndarray
    m3: Optional[np.ndarray] = None

    def __post_init__(self):
        self.risk = np.asarray(self.risk, dtype=float)
        self.m2 = np.asarray(self.m2, dtype=float)
        self.var = np.asarray(self.var, dtype=float)
        if self.m3 is not None:
            self.m3 = np.asarray(self.m3, dtype=float)
        if not np.allclose(self.var, self.m2 - self.risk**2, rtol=1e-9, atol=1e-9):
            raise ConfigurationError("analytic moments must satisfy var = m2 - risk^2")


@dataclass
class FiniteHypothesisClass:
    """Hypotheses with their ``n x |H|`` loss matrix and optional ground truth."""

    hypotheses: np.ndarray
    loss_matrix: np.ndarray
    analytic: Optional[AnalyticTruth] = None

    def __post_init__(self):
        self.hypotheses = np.asarray(self.hypotheses)
        L = np.asarray(self.loss_matrix, dtype=float)
        if L.ndim != 2 or L.shape[0] < 1:
            raise ArgumentError("loss_matrix must be a nonempty 2-d array (samples x hypotheses)")
        if L.shape[1] != len(self.hypotheses):
            raise ArgumentError("loss_matrix columns must match the number of hypotheses")
        if not np.all(np.isfinite(L)) or np.any(L < 0.0):
            raise ArgumentError("losses must be finite and nonnegative")
        self.loss_matrix = L
        if self.analytic is not None and self.analytic.risk.shape != (L.shape[1],):
            raise ArgumentError("analytic truth must have one entry per hypothesis")

    @property
    def n(self) -> int:
        return self.loss_matrix.shape[0]

    @property
    def size(self) -> int:
        return self.loss_matrix.shape[1]

    def empirical_risks(self) -> np.ndarray:
        return self.loss_matrix.mean(axis=0)

    def with_losses(self, loss_matrix) -> "FiniteHypothesisClass":
        return FiniteHypothesisClass(self.hypotheses, loss_matrix, self.analytic)

    def _require_truth(self, what="analytic risks"):
        if self.analytic is None:
            raise CapabilityError(f"{what} require ground truth, which this class does not carry")
        return self.analytic


@dataclass(frozen=True)
class BoundAssumptions:
    """Class-wide moment caps ``M2 >= E l^2``, ``M3 >= E l^3``, ``V >= Var l`` and ``delta``."""

    m2_cap: float
    m3_cap: float
    var_cap: float
    delta: float

    def __post_init__(self):
        for name in ("m2_cap", "m3_cap", "var_cap"):
            v = getattr(self, name)
            if not (v > 0.0 and math.isfinite(v)):
                raise ConfigurationError(f"{name} must be positive and finite")
        if not (0.0 < self.delta < 1.0):
            raise ConfigurationError("delta must lie in (0, 1)")

    @property
    def log_inv_delta(self) -> float:
        return math.log(1.0 / self.delta)

    def check_delta(self):
        if self.delta > DELTA_MAX:
            raise AssumptionViolation("delta <= exp(-1/9)",
                                      f"delta = {self.delta} exceeds exp(-1/9) = {DELTA_MAX:.6f}")

    def risk_cap(self, n: int) -> float:
        """Largest risk allowed: ``sqrt(n M2 / (4 log(1/delta)))``."""
        return math.sqrt(n * self.m2_cap / (4.0 * self.log_inv_delta))

    @classmethod
    def from_truth(cls, truth: AnalyticTruth, delta: float) -> "BoundAssumptions":
        if truth.m3 is None:
            raise CapabilityError("third loss moment is infinite or unknown")
        return cls(m2_cap=float(truth.m2.max()), m3_cap=float(truth.m3.max()),
                   var_cap=float(truth.var.max()), delta=delta)

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class BoundTable:
    """Per-hypothesis upper bounds ``estimate + radius`` holding simultaneously."""

    estimate: np.ndarray
    radius: np.ndarray
    scale: Optional[np.ndarray]
    delta: float
    # simultaneous failure probability is at most this
    failure_probability: float

    @property
    def bound(self) -> np.ndarray:
        return self.estimate + self.radius

    def covers(self, risk) -> np.ndarray:
        return np.asarray(risk) <= self.bound

    def covers_all(self, risk) -> bool:
        return bool(np.all(self.covers(risk)))


@dataclass
class BoundReport:
    """Itemized bound on the Gibbs risk ``E_rho R``.

    ``total = leading_term + (log_const_term + m2_term + prior_quality_term - 1) / sqrt(n) + o1n_term``
    where ``leading_term = gibbs_empirical + kl_term / sqrt(n)``.
    """

    n: int
    delta: float
    scale_s: float
    gibbs_empirical: float
    kl_term: float
    leading_term: float
    log_const_term: float
    m2_term: float
    prior_quality_term: float
    prior_quality_certified: bool
    o1n_term: float
    total: float
    delta_ok: bool
    risk_cap_ok: Optional[bool] = None
    true_gibbs_risk: Optional[float] = None
    valid: Optional[bool] = None
    extra: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        d = asdict(self)
        extra = d.pop("extra")
        d.update({f"extra_{k}": v for k, v in extra.items()})
        return d


# ---------------------------------------------------------------------------
# estimators


def robust_risks(cls: FiniteHypothesisClass, s, trunc: TruncationFn = CATONI_GIULINI) -> np.ndarray:
    """Truncated risk estimates for every hypothesis; ``s`` is a scalar or one scale per column."""
    s = np.broadcast_to(np.asarray(s, dtype=float), (cls.size,))
    if not np.all(s > 0.0) or not np.all(np.isfinite(s)):
        raise ArgumentError("scales must be positive and finite")
    return s * np.mean(psi(trunc, cls.loss_matrix / s[None, :]), axis=0)


def robust_risk_estimate(cls: FiniteHypothesisClass, h_index: int, s: float,
                         trunc: TruncationFn = CATONI_GIULINI) -> float:
    """``(s / n) sum_i psi(l(h; z_i) / s)`` for one hypothesis."""
    from .robust_mean import truncated_mean

    if not (0 <= h_index < cls.size):
        raise ArgumentError(f"hypothesis index {h_index} out of range")
    return truncated_mean(cls.loss_matrix[:, h_index], s, trunc)


def _prior(cls, prior) -> WeightVector:
    pi = prior if isinstance(prior, WeightVector) else WeightVector(prior)
    if len(pi) != cls.size:
        raise ArgumentError("prior must have one weight per hypothesis")
    return pi


def countable_bound(cls: FiniteHypothesisClass, prior, delta: float, m2=None,
                    trunc: TruncationFn = CATONI_GIULINI) -> BoundTable:
    """Simultaneous per-hypothesis bounds from the truncated risk estimator.

    Each hypothesis uses its own scale ``s_h^2 = n m2(h) / (2 log(1/delta))``
    and radius ``sqrt(2 m2(h) (log(1/pi(h)) + log(1/delta)) / n)``; all
    bounds hold together with probability at least ``1 - 2 delta``.

    Parameters
    ----------
    m2 : array_like, optional
        Upper bounds on ``E l(h; z)^2``. Defaults to the class ground truth.
    """
    pi = _prior(cls, prior)
    if np.any(pi.weights <= 0.0):
        raise ArgumentError("countable bound needs a strictly positive prior")
    if not (0.0 < delta < 1.0):
        raise ConfigurationError("delta must lie in (0, 1)")
    if m2 is None:
        m2 = cls._require_truth("per-hypothesis second moments").m2
    m2 = np.broadcast_to(np.asarray(m2, dtype=float), (cls.size,))
    n = cls.n
    log_inv = math.log(1.0 / delta)
    scale = np.sqrt(n * m2 / (2.0 * log_inv))
    radius = np.sqrt(2.0 * m2 * (-pi.log_weights + log_inv) / n)
    return BoundTable(estimate=robust_risks(cls, scale, trunc), radius=radius, scale=scale,
                      delta=delta, failure_probability=min(1.0, 2.0 * delta))


def bounded_loss_bound(cls: FiniteHypothesisClass, prior, delta: float) -> BoundTable:
    """Classical bound for 0/1 loss: empirical risk plus ``sqrt((log(1/pi(h)) + log(1/delta)) / 2n)``."""
    pi = _prior(cls, prior)
    if np.any(pi.weights <= 0.0):
        raise ArgumentError("bound needs a strictly positive prior")
    L = cls.loss_matrix
    if not np.all((L == 0.0) | (L == 1.0)):
        raise ArgumentError("bounded_loss_bound requires losses in {0, 1}")
    radius = np.sqrt((-pi.log_weights + math.log(1.0 / delta)) / (2.0 * cls.n))
    return BoundTable(estimate=cls.empirical_risks(), radius=radius, scale=None,
                      delta=delta, failure_probability=delta)


def prior_quality_term(cls: FiniteHypothesisClass, prior, s: float,
                       trunc: TruncationFn = CATONI_GIULINI, n: Optional[int] = None) -> float:
    """``E_pi exp(sqrt(n) X) / E_pi exp(X)`` with ``X(h) = R(h) - R_psi(h)``.

    Requires the true risks; it measures how well the prior concentrates on
    hypotheses whose risk the estimator does not underestimate.
    """
    truth = cls._require_truth("the prior-quality term")
    pi = _prior(cls, prior)
    n = cls.n if n is None else n
    x = truth.risk - robust_risks(cls, s, trunc)
    return math.exp(log_partition(pi, math.sqrt(n) * x) - log_partition(pi, x))


# ---------------------------------------------------------------------------
# Gibbs-risk bound


def class_scale(n: int, assumptions: BoundAssumptions) -> float:
    """Shared scale ``s = sqrt(n M2 / (2 log(1/delta)))``."""
    return math.sqrt(n * assumptions.m2_cap / (2.0 * assumptions.log_inv_delta))


def log_const_term(m2_cap: float, delta: float) -> float:
    """``log(8 pi M2 / delta^2) / 2``."""
    return 0.5 * (math.log(8.0 * math.pi * m2_cap) + 2.0 * math.log(1.0 / delta))


def o1n_term(n: int, assumptions: BoundAssumptions) -> float:
    """``(2 sqrt(V log(1/delta)) + M3 log(1/delta) / (3 M2 sqrt(n))) / n``."""
    L = assumptions.log_inv_delta
    a = assumptions
    return (2.0 * math.sqrt(a.var_cap * L) + a.m3_cap * L / (3.0 * a.m2_cap * math.sqrt(n))) / n


def _prior_quality(cls, pi, s, trunc, n, cap):
    if cls.analytic is not None:
        return prior_quality_term(cls, pi, s, trunc, n), True
    if cap is None:
        raise CapabilityError("prior-quality term needs ground-truth risks or a pessimistic cap")
    return float(cap), False


def _risk_cap_flag(cls, assumptions, n):
    if cls.analytic is None:
        return None
    return bool(np.all(cls.analytic.risk <= assumptions.risk_cap(n)))


def _finish(cls, pi, rho, assumptions, s, trunc, ghat, kl, leading, cap, extra):
    n = cls.n
    rn = math.sqrt(n)
    pq, certified = _prior_quality(cls, pi, s, trunc, n, cap)
    lc = log_const_term(assumptions.m2_cap, assumptions.delta)
    o1 = o1n_term(n, assumptions)
    total = leading + (lc + assumptions.m2_cap + pq - 1.0) / rn + o1
    true_g = valid = None
    if cls.analytic is not None:
        true_g = rho.expect(cls.analytic.risk)
        valid = bool(true_g <= total)
    return BoundReport(
        n=n, delta=assumptions.delta, scale_s=s,
        gibbs_empirical=ghat, kl_term=kl, leading_term=leading,
        log_const_term=lc, m2_term=assumptions.m2_cap,
        prior_quality_term=pq, prior_quality_certified=certified,
        o1n_term=o1, total=total,
        delta_ok=assumptions.delta <= DELTA_MAX,
        risk_cap_ok=_risk_cap_flag(cls, assumptions, n),
        true_gibbs_risk=true_g, valid=valid, extra=extra,
    )


def uncountable_bound(cls: FiniteHypothesisClass, prior, posterior, assumptions: BoundAssumptions,
                      trunc: TruncationFn = CATONI_GIULINI,
                      prior_quality_cap: Optional[float] = None) -> BoundReport:
    """Upper bound on ``E_rho R`` holding for all posteriors with probability ``>= 1 - delta``.

    The robust estimates use the shared scale ``s^2 = n M2 / (2 log(1/delta))``.
    When the class has no ground truth, ``prior_quality_cap`` stands in for
    the prior-quality term and the report marks it uncertified. A posterior
    that is not absolutely continuous w.r.t. the prior yields ``total = inf``.

    Raises
    ------
    AssumptionViolation
        If ``delta > exp(-1/9)``.
    """
    assumptions.check_delta()
    pi = _prior(cls, prior)
    rho = _prior(cls, posterior)
    s = class_scale(cls.n, assumptions)
    rhat = robust_risks(cls, s, trunc)
    ghat = rho.expect(rhat)
    kl = kl_divergence(rho, pi)
    leading = ghat + kl / math.sqrt(cls.n)
    return _finish(cls, pi, rho, assumptions, s, trunc, ghat, kl, leading, prior_quality_cap, {})


def robust_gibbs_posterior(cls: FiniteHypothesisClass, prior, s: float,
                           trunc: TruncationFn = CATONI_GIULINI,
                           n: Optional[int] = None) -> WeightVector:
    """Posterior with density ``exp(-sqrt(n) R_psi(h)) / E_pi exp(-sqrt(n) R_psi)`` w.r.t. the prior.

    It minimizes ``E_rho R_psi + KL(rho; pi) / sqrt(n)`` over all ``rho``.
    """
    pi = _prior(cls, prior)
    n = cls.n if n is None else n
    return exponential_tilt(pi, -math.sqrt(n) * robust_risks(cls, s, trunc))


def traditional_gibbs_posterior(cls: FiniteHypothesisClass, prior,
                                n: Optional[int] = None) -> WeightVector:
    """Posterior ``pi exp(-n R_emp(h))`` normalized, with ``R_emp`` the empirical mean loss."""
    pi = _prior(cls, prior)
    n = cls.n if n is None else n
    return exponential_tilt(pi, -n * cls.empirical_risks())


def gibbs_objective(cls: FiniteHypothesisClass, prior, posterior, s: float,
                    trunc: TruncationFn = CATONI_GIULINI, n: Optional[int] = None) -> float:
    """``E_rho R_psi + KL(rho; pi) / sqrt(n)``, the posterior-dependent part of the bound."""
    pi = _prior(cls, prior)
    rho = _prior(cls, posterior)
    n = cls.n if n is None else n
    return rho.expect(robust_risks(cls, s, trunc)) + kl_divergence(rho, pi) / math.sqrt(n)


def gibbs_bound(cls: FiniteHypothesisClass, prior, assumptions: BoundAssumptions,
                trunc: TruncationFn = CATONI_GIULINI,
                prior_quality_cap: Optional[float] = None) -> BoundReport:
    """The Gibbs-risk bound evaluated at the robust optimal Gibbs posterior.

    At that posterior the empirical and KL terms collapse to
    ``-log E_pi exp(-sqrt(n) R_psi) / sqrt(n)``, which is used as the leading
    term. The result equals :func:`uncountable_bound` at the same posterior
    up to rounding.
    """
    assumptions.check_delta()
    pi = _prior(cls, prior)
    n = cls.n
    rn = math.sqrt(n)
    s = class_scale(n, assumptions)
    rhat = robust_risks(cls, s, trunc)
    q = exponential_tilt(pi, -rn * rhat)
    leading = -log_partition(pi, -rn * rhat) / rn
    return _finish(cls, pi, q, assumptions, s, trunc, q.expect(rhat), kl_divergence(q, pi),
                   leading, prior_quality_cap, {"posterior": "robust_gibbs"})


def modified_change_of_measure(rho, pi, phi, c_n: float):
    """Both sides of ``E_rho phi <= KL(rho; pi) + log E_pi exp(phi / c_n) - 1 + mass``.

    ``mass = E_pi exp(phi) / E_pi exp(phi / c_n)`` is the total mass of the
    (generally unnormalized) tilted measure. Returns ``(lhs, rhs, mass)``.
    """
    pi = _as_weights(pi)
    rho = _as_weights(rho)
    phi = np.asarray(phi, dtype=float)
    if c_n < 1.0:
        raise ArgumentError("c_n must be at least 1")
    lp_scaled = log_partition(pi, phi / c_n)
    mass = math.exp(log_partition(pi, phi) - lp_scaled)
    lhs = rho.expect(phi)
    rhs = kl_divergence(rho, pi) + lp_scaled - 1.0 + mass
    return lhs, rhs, mass


def _as_weights(w) -> WeightVector:
    return w if isinstance(w, WeightVector) else WeightVector(w)
