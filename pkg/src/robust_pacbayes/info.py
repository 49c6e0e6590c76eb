"""Discrete information-theoretic primitives.

KL divergence on finite spaces, Bernoulli KL and Chernoff bounds, the
log-partition ``log E_pi exp(h)`` and the exponential tilt that attains the
supremum in ``log E_pi exp(h) = sup_rho (E_rho h - KL(rho; pi))``. Also an
empirical check of the strategic-noise deviation inequality that underlies
the truncated mean estimator.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy.special import logsumexp

from .errors import ArgumentError, ConfigurationError
from .trunc import CATONI_GIULINI, TruncationFn, psi

__all__ = [
    "WeightVector",
    "kl_divergence",
    "kl_bernoulli",
    "chernoff_bernoulli_tail",
    "log_partition",
    "exponential_tilt",
    "Lemma31Report",
    "check_lemma31_empirical",
]

SUM_TOL = 1e-12


class WeightVector:
    """A probability vector over a finite index set.

    Parameters
    ----------
    weights : array_like
        Nonnegative finite weights summing to one (within ``1e-12``).
    """

    def __init__(self, weights):
        w = np.array(weights, dtype=float).ravel()
        if w.size == 0:
            raise ArgumentError("weight vector must be nonempty")
        if not np.all(np.isfinite(w)) or np.any(w < 0.0):
            raise ArgumentError("weights must be finite and nonnegative")
        if abs(math.fsum(w) - 1.0) > SUM_TOL:
            raise ArgumentError(f"weights must sum to 1, got {math.fsum(w)!r}")
        w.setflags(write=False)
        self.weights = w

    @classmethod
    def uniform(cls, size: int) -> "WeightVector":
        return cls(np.full(size, 1.0 / size))

    @classmethod
    def from_unnormalized(cls, w) -> "WeightVector":
        w = np.asarray(w, dtype=float)
        total = math.fsum(w)
        if not total > 0:
            raise ArgumentError("unnormalized weights must have positive mass")
        return cls._trusted(w / total)

    @classmethod
    def from_log(cls, log_w) -> "WeightVector":
        """Normalize ``exp(log_w)`` stably; ``-inf`` entries get zero mass."""
        log_w = np.asarray(log_w, dtype=float)
        if not np.any(np.isfinite(log_w)):
            raise ArgumentError("at least one log-weight must be finite")
        lse = logsumexp(log_w)
        return cls._trusted(np.exp(log_w - lse))

    @classmethod
    def _trusted(cls, w):
        # normalization by division can leave the sum a few ulps off 1
        obj = cls.__new__(cls)
        w = np.array(w, dtype=float)
        w.setflags(write=False)
        obj.weights = w
        return obj

    @cached_property
    def log_weights(self) -> np.ndarray:
        with np.errstate(divide="ignore"):
            return np.log(self.weights)

    @cached_property
    def support(self) -> np.ndarray:
        return np.flatnonzero(self.weights > 0.0)

    def __len__(self):
        return self.weights.size

    def __getitem__(self, i):
        return self.weights[i]

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.weights, dtype=dtype)

    def expect(self, values) -> float:
        """``sum_i w_i v_i`` over the support, summed in index order."""
        v = np.asarray(values, dtype=float)
        if v.shape != self.weights.shape:
            raise ArgumentError("values must match the index set")
        s = self.support
        return math.fsum(self.weights[s] * v[s])

    def __repr__(self):
        return f"WeightVector({np.array2string(self.weights, precision=6)})"


def _as_wv(p) -> WeightVector:
    return p if isinstance(p, WeightVector) else WeightVector(p)


def kl_divergence(p, q) -> float:
    """``KL(p; q) = sum_i p_i log(p_i / q_i)``, with ``0 log 0 = 0``.

    Returns ``inf`` when ``q`` puts zero mass where ``p`` does not.
    """
    p, q = _as_wv(p), _as_wv(q)
    if len(p) != len(q):
        raise ArgumentError("p and q must be defined on the same index set")
    s = p.support
    if np.any(q.weights[s] == 0.0):
        return math.inf
    terms = p.weights[s] * (p.log_weights[s] - q.log_weights[s])
    return max(0.0, math.fsum(terms))


def kl_bernoulli(p: float, q: float) -> float:
    """Relative entropy between Bernoulli(p) and Bernoulli(q)."""
    for name, v in (("p", p), ("q", q)):
        if not (0.0 <= v <= 1.0):
            raise ArgumentError(f"{name} must lie in [0, 1], got {v!r}")
    return kl_divergence([p, 1.0 - p], [q, 1.0 - q])


def chernoff_bernoulli_tail(n: int, epsilon: float) -> float:
    """One-sided bound ``P(mean - theta > epsilon) <= exp(-2 n epsilon^2)`` for Bernoulli data."""
    if n < 1:
        raise ArgumentError("n must be a positive integer")
    if not (0.0 < epsilon < 1.0):
        raise ArgumentError("epsilon must lie in (0, 1)")
    return math.exp(-2.0 * n * epsilon * epsilon)


def _check_h(pi: WeightVector, h) -> np.ndarray:
    h = np.asarray(h, dtype=float).ravel()
    if h.shape != pi.weights.shape:
        raise ArgumentError("h must have one value per index")
    if pi.support.size == 0:
        raise ArgumentError("prior has empty support")
    if not np.all(np.isfinite(h[pi.support])):
        raise ArgumentError("h must be finite on the support of pi")
    return h


def log_partition(pi, h) -> float:
    """``log sum_i pi_i exp(h_i)``, computed with a max shift."""
    pi = _as_wv(pi)
    h = _check_h(pi, h)
    s = pi.support
    return float(logsumexp(h[s], b=pi.weights[s]))


def exponential_tilt(pi, h) -> WeightVector:
    """Gibbs tilt ``pi*_i = pi_i exp(h_i) / E_pi exp(h)``.

    ``pi*`` maximizes ``E_rho h - KL(rho; pi)`` and the maximum equals
    :func:`log_partition`.
    """
    pi = _as_wv(pi)
    h = _check_h(pi, h)
    s = pi.support
    log_w = np.full(len(pi), -np.inf)
    log_w[s] = pi.log_weights[s] + h[s]
    return WeightVector.from_log(log_w)


# ---------------------------------------------------------------------------
# strategic-noise inequality


@dataclass
class Lemma31Report:
    """Outcome of the Monte Carlo check of the strategic-noise inequality.

    ``frequency`` is the fraction of trials on which the inequality held for
    every ``theta`` in the panel simultaneously.
    """

    frequency: float
    se: float
    trials: int
    delta: float
    thetas: tuple
    per_theta: dict
    lhs: np.ndarray = field(repr=False)
    rhs: np.ndarray = field(repr=False)

    @property
    def target(self) -> float:
        return 1.0 - self.delta

    @property
    def passed(self) -> bool:
        return self.frequency >= self.target - 3.0 * self.se


def check_lemma31_empirical(dist, n: int, s: float, theta=0.5, delta: float = 0.05,
                            trials: int = 10_000, seed: int = 0,
                            trunc: TruncationFn = CATONI_GIULINI) -> Lemma31Report:
    """Frequency with which the strategic-noise bound holds over repeated samples.

    With ``f(x, eps) = psi(x eps / s)``, noise prior Bernoulli(1/2) and noise
    posterior Bernoulli(theta), the inequality compared on each sample is::

        theta * mean_i psi(x_i / s)
            <= theta * log(1 + E x / s + E x^2 / (2 s^2))
               + (KL(theta; 1/2) + log(1/delta)) / n

    The ``log(1 + ...)`` term upper-bounds ``log E exp(psi(x / s))`` via the
    key property of ``psi``, using the analytic first two moments of
    ``dist``. Every ``theta`` in the panel is checked on the same sample.
    """
    from .synthetic import sample

    thetas = tuple(float(t) for t in np.atleast_1d(theta))
    if any(not (0.0 < t < 1.0) for t in thetas):
        raise ConfigurationError("theta values must lie in (0, 1)")
    if not (0.0 < delta < 1.0):
        raise ConfigurationError("delta must lie in (0, 1)")
    if n < 1 or trials < 1 or not s > 0:
        raise ConfigurationError("n, trials and s must be positive")
    m1, m2 = dist.mean, dist.second_moment
    if m1 is None or m2 is None:
        raise ConfigurationError(f"{dist} has no finite second moment")

    log_mgf_bound = math.log1p(m1 / s + m2 / (2.0 * s * s))
    log_inv_delta = math.log(1.0 / delta)
    th = np.array(thetas)
    kl = np.array([kl_bernoulli(t, 0.5) for t in thetas])
    rhs = th * log_mgf_bound + (kl + log_inv_delta) / n

    lhs = np.empty((trials, th.size))
    for i in range(trials):
        x = sample(dist, n, seed, i)
        lhs[i] = th * float(np.mean(psi(trunc, x / s)))
    holds = lhs <= rhs[None, :]
    joint = holds.all(axis=1)
    f = float(joint.mean())
    return Lemma31Report(
        frequency=f,
        se=math.sqrt(f * (1.0 - f) / trials),
        trials=trials,
        delta=delta,
        thetas=thetas,
        per_theta={t: float(holds[:, j].mean()) for j, t in enumerate(thetas)},
        lhs=lhs,
        rhs=rhs,
    )
