"""Heavy-tailed generators with closed-form moments and synthetic learning problems.

A :class:`DistributionSpec` describes ``x = shift + scale * base`` where
``base`` belongs to one of a few parametric families. Raw moments and lower
partial moments ``E[base**k; base <= t]`` are known in closed form for most
families, which gives exact risks and loss moments for absolute and squared
loss on a grid of location hypotheses. Where a partial moment is not
implemented (Student t), loss moments fall back to a large seeded Monte Carlo
run whose results are cached on disk.
"""

from __future__ import annotations

import enum
import hashlib
import json
import math
import os
import tempfile
import threading
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np
from scipy import special, stats

from .errors import CapabilityError, ConfigurationError
from .rng import GENERATOR_VERSION, stream

__all__ = [
    "Family",
    "DistributionSpec",
    "normal",
    "lognormal",
    "pareto",
    "student_t",
    "bernoulli",
    "point_mass",
    "sample",
    "sample_with",
    "LossKind",
    "LossMoments",
    "LearningProblem",
    "MomentCache",
    "default_moment_cache",
    "analytic_risk",
    "analytic_moments",
]


class Family(str, enum.Enum):
    NORMAL = "Normal"
    LOGNORMAL = "LogNormal"
    PARETO = "Pareto"
    STUDENT_T = "StudentT"
    BERNOULLI = "Bernoulli"
    POINT_MASS = "PointMass"


_REQUIRED = {
    Family.NORMAL: ("mean", "sd"),
    Family.LOGNORMAL: ("mu", "sigma"),
    Family.PARETO: ("xm", "alpha"),
    Family.STUDENT_T: ("nu",),
    Family.BERNOULLI: ("p",),
    Family.POINT_MASS: ("c",),
}


# ---------------------------------------------------------------------------
# base families
#
# Each family exposes an affine reduction to a standard base variable (so
# that Normal(mean, sd) reuses the standard normal formulas), raw moments,
# lower partial moments and a sampler. Infinite moments are reported as inf.


def _affine(family, p):
    if family is Family.NORMAL:
        return p["mean"], p["sd"]
    return 0.0, 1.0


def _std_normal_partial(k, t):
    # M_k = E[Z^k; Z <= t] = -t^(k-1) phi(t) + (k-1) M_(k-2)
    phi = math.exp(-0.5 * t * t) / math.sqrt(2.0 * math.pi) if math.isfinite(t) else 0.0
    m_prev2 = float(special.ndtr(t))
    if k == 0:
        return m_prev2
    m_prev1 = -phi
    for j in range(2, k + 1):
        tj = t ** (j - 1) * phi if phi != 0.0 else 0.0
        m_prev2, m_prev1 = m_prev1, -tj + (j - 1) * m_prev2
    return m_prev1


def _t_abs_moment(nu, k):
    if k >= nu:
        return math.inf
    return math.exp(0.5 * k * math.log(nu) + special.gammaln((k + 1) / 2.0)
                    + special.gammaln((nu - k) / 2.0)
                    - 0.5 * math.log(math.pi) - special.gammaln(nu / 2.0))


def _base_raw_moment(family, p, k):
    """E base**k for the standardized base variable."""
    if k == 0:
        return 1.0
    if family is Family.NORMAL:
        return 0.0 if k % 2 else float(special.factorial2(k - 1, exact=True))
    if family is Family.LOGNORMAL:
        return math.exp(k * p["mu"] + 0.5 * k * k * p["sigma"] ** 2)
    if family is Family.PARETO:
        a, xm = p["alpha"], p["xm"]
        return a * xm**k / (a - k) if k < a else math.inf
    if family is Family.STUDENT_T:
        if k >= p["nu"]:
            return math.inf
        return 0.0 if k % 2 else _t_abs_moment(p["nu"], k)
    if family is Family.BERNOULLI:
        return p["p"]
    if family is Family.POINT_MASS:
        return p["c"] ** k
    raise AssertionError(family)


def _base_abs_moment_finite(family, p, k):
    if family is Family.PARETO:
        return k < p["alpha"]
    if family is Family.STUDENT_T:
        return k < p["nu"]
    return True


def _base_partial_moment(family, p, k, t):
    """E[base**k; base <= t], or None when no closed form is implemented."""
    if family is Family.NORMAL:
        return _std_normal_partial(k, t)
    if family is Family.LOGNORMAL:
        if t <= 0.0:
            return 0.0
        mu, sig = p["mu"], p["sigma"]
        return math.exp(k * mu + 0.5 * k * k * sig * sig) * float(
            special.ndtr((math.log(t) - mu - k * sig * sig) / sig))
    if family is Family.PARETO:
        a, xm = p["alpha"], p["xm"]
        if t <= xm:
            return 0.0
        if k == a:
            return a * xm**a * math.log(t / xm)
        return a * xm**a * (t ** (k - a) - xm ** (k - a)) / (k - a)
    if family is Family.BERNOULLI:
        if t < 0.0:
            return 0.0
        if t < 1.0:
            return (1.0 - p["p"]) if k == 0 else 0.0
        return _base_raw_moment(family, p, k)
    if family is Family.POINT_MASS:
        return p["c"] ** k if p["c"] <= t else 0.0
    return None


def _base_cdf(family, p, t, strict=False):
    """P(base <= t), or P(base < t) when ``strict``."""
    if family is Family.NORMAL:
        return float(special.ndtr(t))
    if family is Family.LOGNORMAL:
        return 0.0 if t <= 0.0 else float(special.ndtr((math.log(t) - p["mu"]) / p["sigma"]))
    if family is Family.PARETO:
        return 0.0 if t <= p["xm"] else 1.0 - (p["xm"] / t) ** p["alpha"]
    if family is Family.STUDENT_T:
        return float(stats.t.cdf(t, p["nu"]))
    if family is Family.BERNOULLI:
        if t < 0.0 or (strict and t == 0.0):
            return 0.0
        if t < 1.0 or (strict and t == 1.0):
            return 1.0 - p["p"]
        return 1.0
    if family is Family.POINT_MASS:
        return float(p["c"] < t) if strict else float(p["c"] <= t)
    raise AssertionError(family)


def _base_sample(family, p, rng, n):
    if family is Family.NORMAL:
        return p["mean"] + p["sd"] * rng.standard_normal(n)
    if family is Family.LOGNORMAL:
        return rng.lognormal(p["mu"], p["sigma"], n)
    if family is Family.PARETO:
        # numpy draws the Lomax (Pareto II) law; 1 + Lomax is Pareto I with x_m = 1
        return p["xm"] * (1.0 + rng.pareto(p["alpha"], n))
    if family is Family.STUDENT_T:
        return rng.standard_t(p["nu"], n)
    if family is Family.BERNOULLI:
        return (rng.random(n) < p["p"]).astype(float)
    if family is Family.POINT_MASS:
        return np.full(n, float(p["c"]))
    raise AssertionError(family)


# ---------------------------------------------------------------------------
# distribution spec


@dataclass(frozen=True)
class DistributionSpec:
    """``x = shift + scale * base`` with ``base`` drawn from ``family(**params)``.

    Use the module-level constructors (:func:`normal`, :func:`pareto`, ...)
    rather than building this directly.
    """

    family: Family
    params: tuple
    shift: float = 0.0
    scale: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "family", Family(self.family))
        params = dict(self.params)
        object.__setattr__(self, "params", tuple(sorted((k, float(v)) for k, v in params.items())))
        missing = [k for k in _REQUIRED[self.family] if k not in params]
        if missing:
            raise ConfigurationError(f"{self.family.value} needs parameters {missing}")
        if not (self.scale > 0.0 and math.isfinite(self.scale)):
            raise ConfigurationError("scale must be positive and finite")
        if not math.isfinite(self.shift):
            raise ConfigurationError("shift must be finite")
        p = self.p
        fam = self.family
        if fam is Family.NORMAL and not p["sd"] > 0:
            raise ConfigurationError("Normal sd must be positive")
        if fam is Family.LOGNORMAL and not p["sigma"] > 0:
            raise ConfigurationError("LogNormal sigma must be positive")
        if fam is Family.PARETO and not (p["alpha"] > 0 and p["xm"] > 0):
            raise ConfigurationError("Pareto needs alpha > 0 and x_m > 0")
        if fam is Family.STUDENT_T and not p["nu"] > 0:
            raise ConfigurationError("StudentT needs nu > 0")
        if fam is Family.BERNOULLI and not (0.0 <= p["p"] <= 1.0):
            raise ConfigurationError("Bernoulli p must lie in [0, 1]")

    @property
    def p(self) -> dict:
        return dict(self.params)

    # -- transforms --------------------------------------------------------

    def shifted(self, c: float) -> "DistributionSpec":
        return DistributionSpec(self.family, self.params, self.shift + c, self.scale)

    def scaled(self, a: float) -> "DistributionSpec":
        return DistributionSpec(self.family, self.params, self.shift * a, self.scale * a)

    def centered(self) -> "DistributionSpec":
        """Same shape shifted to mean zero."""
        m = self.mean
        if m is None:
            raise CapabilityError("cannot center a distribution without a finite mean")
        return self.shifted(-m)

    def with_second_moment(self, target: float) -> "DistributionSpec":
        """Rescale so that ``E x**2 == target``."""
        m2 = self.second_moment
        if m2 is None or m2 == 0.0:
            raise CapabilityError("second moment is infinite or zero")
        return self.scaled(math.sqrt(target / m2))

    # -- affine reduction --------------------------------------------------

    def _ab(self):
        loc, sc = _affine(self.family, self.p)
        return self.shift + self.scale * loc, self.scale * sc

    def abs_moment_finite(self, r: int) -> bool:
        """Whether ``E|x|**r`` is finite."""
        return _base_abs_moment_finite(self.family, self.p, r)

    def raw_moment(self, k: int) -> float:
        """``E x**k``; ``inf`` when ``E|x|**k`` diverges."""
        if not self.abs_moment_finite(k):
            return math.inf
        a, b = self._ab()
        p = self.p
        return math.fsum(math.comb(k, j) * a ** (k - j) * b**j * _base_raw_moment(self.family, p, j)
                         for j in range(k + 1))

    def partial_moment(self, k: int, t: float) -> Optional[float]:
        """``E[x**k; x <= t]``, or ``None`` if not available in closed form."""
        a, b = self._ab()
        tb = (t - a) / b
        p = self.p
        terms = []
        for j in range(k + 1):
            pm = _base_partial_moment(self.family, p, j, tb)
            if pm is None:
                return None
            terms.append(math.comb(k, j) * a ** (k - j) * b**j * pm)
        return math.fsum(terms)

    def cdf(self, t: float, strict: bool = False) -> float:
        a, b = self._ab()
        return _base_cdf(self.family, self.p, (t - a) / b, strict)

    def central_abs_moment(self, theta: float, r: int) -> Optional[float]:
        """``E|x - theta|**r`` in closed form; ``inf`` if divergent, ``None`` if unavailable."""
        if not self.abs_moment_finite(r):
            return math.inf
        a, b = self._ab()
        c = a - theta
        p = self.p
        fam = self.family
        if r % 2 == 0:
            return math.fsum(math.comb(r, j) * c ** (r - j) * b**j * _base_raw_moment(fam, p, j)
                             for j in range(r + 1))
        if c == 0.0 and fam in (Family.NORMAL, Family.STUDENT_T):
            base_abs = (_t_abs_moment(p["nu"], r) if fam is Family.STUDENT_T
                        else 2.0 ** (r / 2.0) * math.exp(special.gammaln((r + 1) / 2.0)) / math.sqrt(math.pi))
            return b**r * base_abs
        # odd r: |y|^r = y^r - 2 y^r 1{y <= 0} with y = c + b * base
        tb = -c / b
        raw_terms, part_terms = [], []
        for j in range(r + 1):
            pm = _base_partial_moment(fam, p, j, tb)
            if pm is None:
                return None
            coef = math.comb(r, j) * c ** (r - j) * b**j
            raw_terms.append(coef * _base_raw_moment(fam, p, j))
            part_terms.append(coef * pm)
        return max(0.0, math.fsum(raw_terms) - 2.0 * math.fsum(part_terms))

    # -- declared moments --------------------------------------------------

    @property
    def mean(self) -> Optional[float]:
        v = self.raw_moment(1)
        return v if math.isfinite(v) else None

    @property
    def second_moment(self) -> Optional[float]:
        v = self.raw_moment(2)
        return v if math.isfinite(v) else None

    @property
    def variance(self) -> Optional[float]:
        if not self.abs_moment_finite(2):
            return None
        a, b = self._ab()
        p = self.p
        m1 = _base_raw_moment(self.family, p, 1)
        return b * b * max(0.0, _base_raw_moment(self.family, p, 2) - m1 * m1)

    @property
    def third_abs_moment(self) -> Optional[float]:
        v = self.central_abs_moment(0.0, 3)
        return v if v is not None and math.isfinite(v) else None

    # -- serialization -----------------------------------------------------

    def to_dict(self) -> dict:
        return {"family": self.family.value, "params": dict(self.params),
                "shift": self.shift, "scale": self.scale}

    @classmethod
    def from_dict(cls, d: dict) -> "DistributionSpec":
        return cls(Family(d["family"]), tuple(d["params"].items()),
                   float(d.get("shift", 0.0)), float(d.get("scale", 1.0)))

    def key(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    def __str__(self):
        args = ", ".join(f"{k}={v:g}" for k, v in self.params)
        s = f"{self.family.value}({args})"
        if self.scale != 1.0:
            s = f"{self.scale:g}*{s}"
        if self.shift != 0.0:
            s = f"{s}{self.shift:+g}"
        return s


def normal(mean: float = 0.0, sd: float = 1.0) -> DistributionSpec:
    return DistributionSpec(Family.NORMAL, (("mean", mean), ("sd", sd)))


def lognormal(mu: float = 0.0, sigma: float = 1.0) -> DistributionSpec:
    return DistributionSpec(Family.LOGNORMAL, (("mu", mu), ("sigma", sigma)))


def pareto(alpha: float, xm: float = 1.0) -> DistributionSpec:
    return DistributionSpec(Family.PARETO, (("alpha", alpha), ("xm", xm)))


def student_t(nu: float) -> DistributionSpec:
    return DistributionSpec(Family.STUDENT_T, (("nu", nu),))


def bernoulli(p: float) -> DistributionSpec:
    return DistributionSpec(Family.BERNOULLI, (("p", p),))


def point_mass(c: float) -> DistributionSpec:
    return DistributionSpec(Family.POINT_MASS, (("c", c),))


def sample_with(dist: DistributionSpec, rng: np.random.Generator, n: int) -> np.ndarray:
    if n < 1:
        raise ConfigurationError("sample size must be positive")
    return dist.shift + dist.scale * _base_sample(dist.family, dist.p, rng, n)


def sample(dist: DistributionSpec, n: int, seed: int, index: int = 0) -> np.ndarray:
    """``n`` iid draws, reproducible for fixed ``(dist, n, seed, index)``."""
    return sample_with(dist, stream(seed, index), n)


# ---------------------------------------------------------------------------
# moment cache


class MomentCache:
    """JSON file mapping a problem hash to a Monte Carlo moment record.

    Writes go through a lock and an atomic rename, so readers only ever see
    complete files.
    """

    def __init__(self, path=None):
        self.path = Path(path) if path is not None else None
        self._lock = threading.Lock()
        self._mem: dict = {}

    def _read(self) -> dict:
        if self.path is None or not self.path.exists():
            return {}
        try:
            with open(self.path, encoding="utf-8") as fh:
                return json.load(fh)
        except (OSError, json.JSONDecodeError):
            return {}

    def get(self, key: str) -> Optional[dict]:
        with self._lock:
            if key in self._mem:
                return self._mem[key]
            rec = self._read().get(key)
            if rec is not None and rec.get("generator_version") == GENERATOR_VERSION:
                self._mem[key] = rec
                return rec
            return None

    def put(self, key: str, record: dict) -> None:
        record = dict(record, generator_version=GENERATOR_VERSION)
        with self._lock:
            self._mem[key] = record
            if self.path is None:
                return
            data = self._read()
            data[key] = record
            self.path.parent.mkdir(parents=True, exist_ok=True)
            fd, tmp = tempfile.mkstemp(dir=self.path.parent, prefix=".moments-", suffix=".json")
            try:
                with os.fdopen(fd, "w", encoding="utf-8") as fh:
                    json.dump(data, fh, sort_keys=True, indent=1)
                os.replace(tmp, self.path)
            except BaseException:
                if os.path.exists(tmp):
                    os.unlink(tmp)
                raise


_default_cache: Optional[MomentCache] = None


def default_moment_cache() -> MomentCache:
    """Process-wide cache at ``$ROBUST_PB_CACHE`` or ``~/.cache/robust_pacbayes/moments.json``."""
    global _default_cache
    if _default_cache is None:
        path = os.environ.get("ROBUST_PB_CACHE")
        if path is None:
            path = Path.home() / ".cache" / "robust_pacbayes" / "moments.json"
        _default_cache = MomentCache(path)
    return _default_cache


# ---------------------------------------------------------------------------
# learning problems


class LossKind(str, enum.Enum):
    ABSOLUTE = "Absolute"
    SQUARED = "Squared"
    ZERO_ONE = "ZeroOne"


@dataclass(frozen=True)
class LossMoments:
    """Per-hypothesis loss moments ``R = E l``, ``m2 = E l^2``, ``m3 = E l^3``, ``var``.

    ``m3`` is ``None`` when ``E l^3`` is infinite. ``se`` holds Monte Carlo
    standard errors for any entry that was not available in closed form.
    """

    risk: float
    m2: float
    m3: Optional[float]
    var: float
    se: dict = field(default_factory=dict)


def _sign(u):
    return np.where(np.asarray(u) >= 0.0, 1.0, -1.0)


@dataclass(frozen=True)
class LearningProblem:
    """Location hypotheses ``theta`` scored by a loss on data drawn from ``data_dist``.

    Losses: ``Absolute`` ``|theta - z|``, ``Squared`` ``(theta - z)^2`` and
    ``ZeroOne`` ``I{sign(z) != sign(theta)}`` with ``sign(0) = +1``.
    """

    data_dist: DistributionSpec
    loss_kind: LossKind
    hypothesis_grid: tuple
    mc_samples: int = 10**7
    mc_seed: int = 20190508
    cache: Optional[MomentCache] = field(default=None, compare=False, hash=False)

    def __post_init__(self):
        object.__setattr__(self, "loss_kind", LossKind(self.loss_kind))
        grid = tuple(float(t) for t in np.ravel(self.hypothesis_grid))
        if not grid:
            raise ConfigurationError("hypothesis grid must be nonempty")
        object.__setattr__(self, "hypothesis_grid", grid)

    @property
    def power(self) -> int:
        return 2 if self.loss_kind is LossKind.SQUARED else 1

    def loss(self, theta, z):
        """Loss matrix ``l(theta_j; z_i)`` broadcast over ``theta`` and ``z``."""
        theta = np.asarray(theta, dtype=float)
        z = np.asarray(z, dtype=float)
        if self.loss_kind is LossKind.ABSOLUTE:
            return np.abs(theta - z)
        if self.loss_kind is LossKind.SQUARED:
            return (theta - z) ** 2
        return (_sign(z) != _sign(theta)).astype(float)

    def loss_matrix(self, data) -> np.ndarray:
        z = np.asarray(data, dtype=float).reshape(-1, 1)
        return self.loss(np.asarray(self.hypothesis_grid)[None, :], z)

    def problem_hash(self) -> str:
        payload = json.dumps({"dist": self.data_dist.to_dict(), "loss": self.loss_kind.value,
                              "mc_samples": self.mc_samples, "mc_seed": self.mc_seed},
                             sort_keys=True)
        return hashlib.sha256(payload.encode()).hexdigest()[:16]

    # -- moments -----------------------------------------------------------

    def _check_moment(self, order: int, what: str):
        r = order * self.power
        if self.loss_kind is not LossKind.ZERO_ONE and not self.data_dist.abs_moment_finite(r):
            raise CapabilityError(
                f"{what} of {self.loss_kind.value} loss needs E|z|^{r} < inf, "
                f"which fails for {self.data_dist}")

    def _mc_abs_moment(self, theta: float, r: int):
        cache = self.cache if self.cache is not None else default_moment_cache()
        key = f"{self.problem_hash()}:theta={theta!r}:r={r}"
        rec = cache.get(key)
        if rec is None:
            rng = stream(self.mc_seed, 0)
            total = 0.0
            total_sq = 0.0
            n_done = 0
            chunk = 10**6
            while n_done < self.mc_samples:
                m = min(chunk, self.mc_samples - n_done)
                v = np.abs(sample_with(self.data_dist, rng, m) - theta) ** r
                total += math.fsum(v)
                total_sq += math.fsum(v * v)
                n_done += m
            mean = total / n_done
            var = max(0.0, total_sq / n_done - mean * mean)
            rec = {"value": mean, "se": math.sqrt(var / n_done), "n_samples": n_done,
                   "theta": theta, "r": r, "dist": self.data_dist.to_dict()}
            cache.put(key, rec)
        return rec["value"], rec["se"]

    def _abs_moment(self, theta: float, r: int):
        v = self.data_dist.central_abs_moment(theta, r)
        if v is not None:
            return v, None
        return self._mc_abs_moment(theta, r)

    def analytic_risk(self, theta: float) -> float:
        """True risk ``R(theta) = E l(theta; z)``."""
        theta = float(theta)
        if self.loss_kind is LossKind.ZERO_ONE:
            return self._zero_one_prob(theta)
        self._check_moment(1, "risk")
        return self._abs_moment(theta, self.power)[0]

    def _zero_one_prob(self, theta):
        p_neg = self.data_dist.cdf(0.0, strict=True)
        return p_neg if theta >= 0.0 else 1.0 - p_neg

    def analytic_moments(self, theta: float, require_third: bool = True) -> LossMoments:
        """Risk, second and third moments and variance of the loss at ``theta``.

        Raises :class:`CapabilityError` naming the violated moment condition
        when ``m2`` (or ``m3`` with ``require_third``) is infinite.
        """
        theta = float(theta)
        if self.loss_kind is LossKind.ZERO_ONE:
            p = self._zero_one_prob(theta)
            return LossMoments(risk=p, m2=p, m3=p, var=p * (1.0 - p))
        q = self.power
        se = {}
        self._check_moment(1, "risk")
        self._check_moment(2, "second moment")
        risk, e = self._abs_moment(theta, q)
        if e is not None:
            se["risk"] = e
        m2, e = self._abs_moment(theta, 2 * q)
        if e is not None:
            se["m2"] = e
        m3 = None
        if self.data_dist.abs_moment_finite(3 * q):
            m3, e = self._abs_moment(theta, 3 * q)
            if e is not None:
                se["m3"] = e
        elif require_third:
            self._check_moment(3, "third moment")
        return LossMoments(risk=risk, m2=m2, m3=m3, var=max(0.0, m2 - risk * risk), se=se)

    def grid_moments(self, require_third: bool = True) -> list:
        return [self.analytic_moments(t, require_third) for t in self.hypothesis_grid]

    def truth(self, require_third: bool = False):
        """Ground-truth risks and moments over the grid as an ``AnalyticTruth``."""
        from .pacbayes import AnalyticTruth

        moms = self.grid_moments(require_third=require_third)
        return AnalyticTruth(
            risk=np.array([m.risk for m in moms]),
            m2=np.array([m.m2 for m in moms]),
            m3=None if any(m.m3 is None for m in moms) else np.array([m.m3 for m in moms]),
            var=np.array([m.var for m in moms]),
        )

    def make_class(self, data, require_third: bool = False, truth=None):
        """Hypothesis class with the loss matrix on ``data`` and ground-truth moments.

        Pass a precomputed ``truth`` to avoid recomputing moments per sample.
        """
        from .pacbayes import FiniteHypothesisClass

        if truth is None:
            truth = self.truth(require_third)
        return FiniteHypothesisClass(hypotheses=np.asarray(self.hypothesis_grid),
                                     loss_matrix=self.loss_matrix(data), analytic=truth)

    def to_dict(self) -> dict:
        return {"data_dist": self.data_dist.to_dict(), "loss_kind": self.loss_kind.value,
                "hypothesis_grid": list(self.hypothesis_grid)}

    @classmethod
    def from_dict(cls, d: dict, cache: Optional[MomentCache] = None) -> "LearningProblem":
        return cls(DistributionSpec.from_dict(d["data_dist"]), LossKind(d["loss_kind"]),
                   tuple(d["hypothesis_grid"]), cache=cache)


def analytic_risk(problem: LearningProblem, theta: float) -> float:
    return problem.analytic_risk(theta)


def analytic_moments(problem: LearningProblem, theta: float) -> tuple:
    """``(m2, m3, var)`` of the loss at ``theta``."""
    m = problem.analytic_moments(theta)
    return m.m2, m.m3, m.var
