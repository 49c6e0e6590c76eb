"""Monte Carlo experiments that check each guarantee empirically.

Every experiment is a function of an :class:`ExperimentConfig` returning a
list of per-trial records (one dict per row of ``trials.csv``) and a summary
dict. Trial ``i`` draws its data from the stream keyed by ``(seed, i)``, so
the output does not depend on how trials are scheduled.

Frequency checks use three Monte Carlo standard errors of slack,
``SE = sqrt(f (1 - f) / trials)``.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy.special import xlogy

from .. import pacbayes as pb
from ..errors import CapabilityError, ConfigurationError
from ..info import (WeightVector, check_lemma31_empirical, chernoff_bernoulli_tail,
                    exponential_tilt, kl_divergence, log_partition)
from ..rng import GENERATOR_VERSION, stream
from ..robust_mean import RobustMeanConfig, estimate, estimate_centered, select_scale
from ..synthetic import DistributionSpec, lognormal, sample, student_t
from .config import ExperimentConfig, ExperimentKind, parse_distribution, parse_problem
from .io import write_summary_json, write_trials_csv

__all__ = ["RunResult", "run", "compare_estimators", "frequency_summary", "QUANTILES"]

QUANTILES = (0.9, 0.95, 0.99)
MC_SLACK = 3.0

DEFAULT_DISTRIBUTION = {"family": "StudentT", "params": {"nu": 2.5}, "second_moment": 1.0}
DEFAULT_PROBLEM = {
    "data_dist": {"family": "LogNormal", "params": {"mu": 0.0, "sigma": 1.0}},
    "loss_kind": "Absolute",
    "grid": {"start": 0.5, "stop": 3.0, "num": 16},
}
DEFAULT_ZERO_ONE_PROBLEM = {
    "data_dist": {"family": "Normal", "params": {"mean": 0.3, "sd": 1.0}},
    "loss_kind": "ZeroOne",
    "grid": [-1.0, -0.5, 0.5, 1.0],
}


@dataclass
class RunResult:
    columns: list
    records: list
    summary: dict

    @property
    def hit_frequency(self) -> Optional[float]:
        return self.summary.get("frequency")

    @property
    def passed(self) -> Optional[bool]:
        return self.summary.get("passed")


def frequency_summary(hits, target: float, upper: bool = False) -> dict:
    """Frequency of ``hits`` compared with ``target`` at 3 standard errors.

    With ``upper`` the frequency must not exceed ``target + 3 SE`` (miss
    rates); otherwise it must reach ``target - 3 SE`` (coverage).
    """
    hits = np.asarray(hits, dtype=bool)
    t = hits.size
    f = float(hits.mean())
    se = math.sqrt(f * (1.0 - f) / t)
    ok = f <= target + MC_SLACK * se if upper else f >= target - MC_SLACK * se
    return {"frequency": f, "se": se, "target": target, "trials": t, "passed": bool(ok)}


def _quantiles(values) -> dict:
    v = np.asarray(values, dtype=float)
    return {str(q): float(np.quantile(v, q)) for q in QUANTILES}


def _map_trials(fn: Callable[[int], dict], trials: int, workers: int) -> list:
    if workers <= 1:
        return [fn(i) for i in range(trials)]
    with ThreadPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(fn, range(trials), chunksize=max(1, trials // (4 * workers))))


def _distribution(cfg: ExperimentConfig, default=DEFAULT_DISTRIBUTION) -> DistributionSpec:
    return parse_distribution(cfg.distribution if cfg.distribution is not None else default)


def _need(value, what, dist):
    if value is None:
        raise ConfigurationError(f"{dist} has no finite {what}")
    return value


# ---------------------------------------------------------------------------
# mean estimation


def _coverage(cfg: ExperimentConfig):
    dist = _distribution(cfg)
    mean = _need(dist.mean, "mean", dist)
    m2 = float(cfg.params.get("m2_bound", _need(dist.second_moment, "second moment", dist)))
    rm = RobustMeanConfig(delta=cfg.delta, m2_bound=m2)

    def trial(i):
        x = sample(dist, cfg.n, cfg.seed, i)
        rep = estimate(x, rm)
        dev = rep.estimate - mean
        emp = float(np.mean(x))
        return {"trial": i, "estimate": rep.estimate, "empirical_mean": emp, "radius": rep.radius,
                "deviation": dev, "empirical_deviation": emp - mean,
                "hit": abs(dev) <= rep.radius}

    recs = _map_trials(trial, cfg.trials, cfg.workers)
    summary = frequency_summary([r["hit"] for r in recs], 1.0 - 2.0 * cfg.delta)
    summary.update({
        "distribution": str(dist), "mean": mean, "m2_bound": m2, "radius": recs[0]["radius"],
        "scale_s": select_scale(cfg.n, rm),
        "abs_deviation_quantiles": {
            "truncated": _quantiles([abs(r["deviation"]) for r in recs]),
            "empirical_mean": _quantiles([abs(r["empirical_deviation"]) for r in recs]),
        },
    })
    cols = ["trial", "estimate", "empirical_mean", "radius", "deviation", "empirical_deviation", "hit"]
    return cols, recs, summary


def _centered_coverage(cfg: ExperimentConfig):
    dist = _distribution(cfg)
    mean = _need(dist.mean, "mean", dist)
    m2 = float(cfg.params.get("m2_bound", _need(dist.second_moment, "second moment", dist)))
    var = float(cfg.params.get("var_bound", _need(dist.variance, "variance", dist)))
    k = int(cfg.params.get("k", cfg.n // 2))
    rm = RobustMeanConfig(delta=cfg.delta, m2_bound=m2)

    def trial(i):
        x = sample(dist, cfg.n, cfg.seed, i)
        c = estimate_centered(x, rm, k=k, var_bound=var)
        u = estimate(x, rm)
        dev = c.estimate - mean
        return {"trial": i, "estimate": c.estimate, "shift": c.shift, "radius": c.radius,
                "epsilon_k": c.epsilon_k, "deviation": dev, "miss": abs(dev) > c.radius,
                "uncentered_estimate": u.estimate, "uncentered_deviation": u.estimate - mean}

    recs = _map_trials(trial, cfg.trials, cfg.workers)
    r0 = recs[0]
    eps = r0["radius"]
    bound = min(1.0, 4.0 * math.exp(-(cfg.n - k) * eps**2 / (2.0 * (var + r0["epsilon_k"] ** 2))))
    summary = frequency_summary([r["miss"] for r in recs], bound, upper=True)
    q_c = _quantiles([abs(r["deviation"]) for r in recs])
    q_u = _quantiles([abs(r["uncentered_deviation"]) for r in recs])
    summary.update({
        "distribution": str(dist), "mean": mean, "m2_bound": m2, "var_bound": var, "k": k,
        "epsilon": eps, "epsilon_k": r0["epsilon_k"], "miss_bound": bound,
        "abs_deviation_quantiles": {"centered": q_c, "uncentered": q_u},
        "centered_beats_uncentered_q99": q_c["0.99"] < q_u["0.99"],
        "rmse": {"centered": float(np.sqrt(np.mean([r["deviation"] ** 2 for r in recs]))),
                 "uncentered": float(np.sqrt(np.mean([r["uncentered_deviation"] ** 2 for r in recs])))},
    })
    cols = ["trial", "estimate", "shift", "radius", "epsilon_k", "deviation", "miss",
            "uncentered_estimate", "uncentered_deviation"]
    return cols, recs, summary


def _lemma31(cfg: ExperimentConfig):
    dist = _distribution(cfg, {"family": "LogNormal", "params": {"mu": 0.0, "sigma": 1.0}})
    thetas = tuple(cfg.params.get("thetas", (0.5, 0.9)))
    m2 = _need(dist.second_moment, "second moment", dist)
    s = float(cfg.params.get("s", select_scale(cfg.n, RobustMeanConfig(cfg.delta, m2))))
    rep = check_lemma31_empirical(dist, cfg.n, s, thetas, cfg.delta, cfg.trials, cfg.seed)
    holds = rep.lhs <= rep.rhs[None, :]
    recs = []
    for i in range(cfg.trials):
        r = {"trial": i}
        for j, t in enumerate(thetas):
            r[f"lhs_theta_{t:g}"] = rep.lhs[i, j]
            r[f"rhs_theta_{t:g}"] = rep.rhs[j]
        r["holds"] = bool(holds[i].all())
        recs.append(r)
    summary = frequency_summary([r["holds"] for r in recs], 1.0 - cfg.delta)
    summary.update({"distribution": str(dist), "s": s, "thetas": list(thetas),
                    "per_theta_frequency": {f"{t:g}": v for t, v in rep.per_theta.items()}})
    cols = ["trial"] + [c for t in thetas for c in (f"lhs_theta_{t:g}", f"rhs_theta_{t:g}")] + ["holds"]
    return cols, recs, summary


def _chernoff(cfg: ExperimentConfig):
    """Upper-tail frequency of Bernoulli sample means on a grid of cells.

    One CSV row per cell; a cell's ``trials`` binomial counts come from the
    stream keyed by ``(seed, cell index)``.
    """
    thetas = cfg.params.get("thetas", (0.1, 0.3, 0.5))
    ns = cfg.params.get("ns", (10, 50, 200))
    epsilons = cfg.params.get("epsilons", (0.05, 0.1, 0.15))
    recs = []
    cell = 0
    for theta in thetas:
        for n in ns:
            for eps in epsilons:
                if not (0.0 < eps < 1.0 - theta):
                    continue
                counts = stream(cfg.seed, cell).binomial(int(n), float(theta), size=cfg.trials)
                exceed = counts / n - theta > eps
                bound = chernoff_bernoulli_tail(int(n), float(eps))
                fs = frequency_summary(exceed, bound, upper=True)
                recs.append({"cell": cell, "theta": float(theta), "n": int(n), "epsilon": float(eps),
                             "frequency": fs["frequency"], "se": fs["se"], "bound": bound,
                             "passed": fs["passed"]})
                cell += 1
    summary = {"cells": len(recs), "trials_per_cell": cfg.trials,
               "passed": all(r["passed"] for r in recs),
               "max_excess": max(r["frequency"] - r["bound"] for r in recs)}
    cols = ["cell", "theta", "n", "epsilon", "frequency", "se", "bound", "passed"]
    return cols, recs, summary


# ---------------------------------------------------------------------------
# PAC-Bayes bounds


def _problem(cfg, default=DEFAULT_PROBLEM):
    return parse_problem(cfg.problem if cfg.problem is not None else default)


def _prior(cfg, size):
    spec = cfg.params.get("prior", "uniform")
    if spec == "uniform":
        return WeightVector.uniform(size)
    return WeightVector.from_unnormalized(spec)


def _countable(cfg: ExperimentConfig):
    prob = _problem(cfg)
    truth = prob.truth(require_third=False)
    pi = _prior(cfg, len(prob.hypothesis_grid))

    def trial(i):
        x = sample(prob.data_dist, cfg.n, cfg.seed, i)
        cls = prob.make_class(x, truth=truth)
        tab = pb.countable_bound(cls, pi, cfg.delta)
        slack = tab.bound - truth.risk
        return {"trial": i, "all_covered": bool(np.all(slack >= 0.0)),
                "min_slack": float(slack.min()), "worst_h": int(np.argmin(slack)),
                "mean_bound": float(tab.bound.mean())}

    recs = _map_trials(trial, cfg.trials, cfg.workers)
    summary = frequency_summary([r["all_covered"] for r in recs], 1.0 - 2.0 * cfg.delta)
    summary.update({"problem": prob.to_dict(), "risk": truth.risk, "m2": truth.m2})
    return ["trial", "all_covered", "min_slack", "worst_h", "mean_bound"], recs, summary


def _bounded_loss(cfg: ExperimentConfig):
    prob = _problem(cfg, DEFAULT_ZERO_ONE_PROBLEM)
    truth = prob.truth()
    pi = _prior(cfg, len(prob.hypothesis_grid))

    def trial(i):
        x = sample(prob.data_dist, cfg.n, cfg.seed, i)
        cls = prob.make_class(x, truth=truth)
        tab = pb.bounded_loss_bound(cls, pi, cfg.delta)
        slack = tab.bound - truth.risk
        return {"trial": i, "all_covered": bool(np.all(slack >= 0.0)),
                "min_slack": float(slack.min()), "worst_h": int(np.argmin(slack))}

    recs = _map_trials(trial, cfg.trials, cfg.workers)
    summary = frequency_summary([r["all_covered"] for r in recs], 1.0 - cfg.delta)
    summary.update({"problem": prob.to_dict(), "risk": truth.risk})
    return ["trial", "all_covered", "min_slack", "worst_h"], recs, summary


REPORT_COLUMNS = ["gibbs_empirical", "kl_term", "leading_term", "log_const_term", "m2_term",
                  "prior_quality_term", "o1n_term", "total", "true_gibbs_risk", "valid"]


def prior_quality_growth(prob, truth, assumptions_for, ns, trials, seed, prior=None) -> dict:
    """Mean and median of the prior-quality term at the robust scale for each ``n``."""
    out = {}
    pi = prior if prior is not None else WeightVector.uniform(len(prob.hypothesis_grid))
    for n in ns:
        a = assumptions_for(n)
        s = pb.class_scale(n, a)
        vals = []
        for i in range(trials):
            x = sample(prob.data_dist, n, seed, i)
            vals.append(pb.prior_quality_term(prob.make_class(x, truth=truth), pi, s))
        out[str(n)] = {"mean": float(np.mean(vals)), "median": float(np.median(vals)),
                       "max": float(np.max(vals))}
    return out


def _uncountable(cfg: ExperimentConfig):
    prob = _problem(cfg)
    truth = prob.truth(require_third=True)
    a = pb.BoundAssumptions.from_truth(truth, cfg.delta)
    a.check_delta()
    pi = _prior(cfg, len(prob.hypothesis_grid))
    posterior = cfg.params.get("posterior", "robust_gibbs")

    def trial(i):
        x = sample(prob.data_dist, cfg.n, cfg.seed, i)
        cls = prob.make_class(x, truth=truth)
        if posterior == "robust_gibbs":
            rep = pb.gibbs_bound(cls, pi, a)
        elif posterior == "prior":
            rep = pb.uncountable_bound(cls, pi, pi, a)
        else:
            raise ConfigurationError(f"unknown posterior {posterior!r}")
        d = rep.to_dict()
        rec = {"trial": i}
        rec.update({c: d[c] for c in REPORT_COLUMNS})
        return rec

    recs = _map_trials(trial, cfg.trials, cfg.workers)
    summary = frequency_summary([r["valid"] for r in recs], 1.0 - cfg.delta)
    summary.update({
        "problem": prob.to_dict(), "assumptions": a.to_dict(), "posterior": posterior,
        "risk_cap_ok": bool(np.all(truth.risk <= a.risk_cap(cfg.n))),
        "mean_terms": {c: float(np.mean([r[c] for r in recs])) for c in REPORT_COLUMNS if c != "valid"},
    })
    growth_ns = cfg.params.get("growth_ns", (100, 400, 1600))
    if growth_ns:
        summary["prior_quality_growth"] = prior_quality_growth(
            prob, truth, lambda n: a, growth_ns, int(cfg.params.get("growth_trials", 100)),
            cfg.seed, pi)
    return ["trial"] + REPORT_COLUMNS, recs, summary


def _gibbs_compare(cfg: ExperimentConfig):
    """True Gibbs risk of the robust and traditional posteriors under one injected outlier.

    ``params.outlier`` is added to one entry of the loss matrix: row 0 of the
    column of the hypothesis with the smallest true risk (``mode = "column"``),
    or, with ``mode = "row"``, the first observation is replaced by
    ``params.outlier_value`` before losses are computed.
    """
    default = dict(DEFAULT_PROBLEM, grid={"start": 0.5, "stop": 3.0, "num": 32})
    prob = _problem(cfg, default)
    truth = prob.truth(require_third=False)
    pi = _prior(cfg, len(prob.hypothesis_grid))
    m2_cap = float(cfg.params.get("m2_cap", truth.m2.max()))
    s = math.sqrt(cfg.n * m2_cap / (2.0 * math.log(1.0 / cfg.delta)))
    mode = cfg.params.get("mode", "column")
    outlier = float(cfg.params.get("outlier", 100.0 * math.sqrt(m2_cap * cfg.n)))
    best = int(np.argmin(truth.risk))

    def trial(i):
        x = sample(prob.data_dist, cfg.n, cfg.seed, i)
        if mode == "row":
            x = x.copy()
            x[0] = float(cfg.params.get("outlier_value", outlier))
            cls = prob.make_class(x, truth=truth)
        elif mode == "column":
            cls = prob.make_class(x, truth=truth)
            L = cls.loss_matrix.copy()
            L[0, best] += outlier
            cls = cls.with_losses(L)
        else:
            raise ConfigurationError(f"unknown contamination mode {mode!r}")
        q_rob = pb.robust_gibbs_posterior(cls, pi, s)
        q_emp = pb.traditional_gibbs_posterior(cls, pi)
        return {"trial": i, "robust_gibbs_risk": q_rob.expect(truth.risk),
                "traditional_gibbs_risk": q_emp.expect(truth.risk),
                "robust_mass_best": float(q_rob[best]), "traditional_mass_best": float(q_emp[best])}

    recs = _map_trials(trial, cfg.trials, cfg.workers)
    g_r = np.array([r["robust_gibbs_risk"] for r in recs])
    g_t = np.array([r["traditional_gibbs_risk"] for r in recs])
    diff = g_r - g_t
    se = float(diff.std(ddof=1) / math.sqrt(diff.size)) if diff.size > 1 else 0.0
    summary = {
        "problem": prob.to_dict(), "mode": mode, "outlier": outlier, "best_h": best, "scale_s": s,
        "mean_robust_gibbs_risk": float(g_r.mean()), "mean_traditional_gibbs_risk": float(g_t.mean()),
        "se_difference": se,
        "passed": bool(g_r.mean() <= g_t.mean() + MC_SLACK * se),
        "mean_robust_mass_best": float(np.mean([r["robust_mass_best"] for r in recs])),
        "mean_traditional_mass_best": float(np.mean([r["traditional_mass_best"] for r in recs])),
        "min_risk": float(truth.risk.min()),
    }
    cols = ["trial", "robust_gibbs_risk", "traditional_gibbs_risk", "robust_mass_best",
            "traditional_mass_best"]
    return cols, recs, summary


# ---------------------------------------------------------------------------
# change-of-measure identity


def _identity_check(cfg: ExperimentConfig):
    """Variational identity ``log E_pi e^h = max_rho (E_rho h - KL(rho; pi))`` on random finite spaces."""
    grid_points = int(cfg.params.get("grid_points", 10_001))
    samples = int(cfg.params.get("samples", 1000))
    max_size = int(cfg.params.get("max_size", 16))
    h_scale = float(cfg.params.get("h_scale", 3.0))

    def trial(i):
        rng = stream(cfg.seed, i)
        size = int(rng.integers(2, max_size + 1))
        z = rng.normal(size=size)
        pi = WeightVector.from_log(z)
        h = h_scale * rng.normal(size=size)
        lp = log_partition(pi, h)
        star = exponential_tilt(pi, h)
        attained = star.expect(h) - kl_divergence(star, pi)
        if size == 2:
            t = np.linspace(0.0, 1.0, grid_points)
            rhos = np.column_stack([t, 1.0 - t])
        else:
            flat = rng.dirichlet(np.ones(size), samples // 2)
            sparse = rng.dirichlet(np.full(size, 0.2), samples // 4)
            local = star.weights * np.exp(0.05 * rng.normal(size=(samples - samples // 2 - samples // 4, size)))
            local /= local.sum(axis=1, keepdims=True)
            rhos = np.vstack([flat, sparse, local])
        vals = rhos @ h - np.sum(xlogy(rhos, rhos) - rhos * pi.log_weights[None, :], axis=1)
        rho = rng.dirichlet(np.ones(size))
        decomp = abs(kl_divergence(rho, star) - (kl_divergence(rho, pi) + lp - WeightVector(rho).expect(h)))
        return {"trial": i, "size": size, "log_partition": lp, "attained": attained,
                "gap": lp - attained, "max_excess": float(vals.max() - lp),
                "decomposition_error": decomp}

    recs = _map_trials(trial, cfg.trials, cfg.workers)
    tol = float(cfg.params.get("tolerance", 1e-10))
    max_gap = max(abs(r["gap"]) for r in recs)
    max_exc = max(r["max_excess"] for r in recs)
    max_dec = max(r["decomposition_error"] for r in recs)
    summary = {"max_abs_gap": max_gap, "max_excess": max_exc, "max_decomposition_error": max_dec,
               "tolerance": tol, "passed": max_gap <= tol and max_exc <= tol and max_dec <= tol}
    cols = ["trial", "size", "log_partition", "attained", "gap", "max_excess", "decomposition_error"]
    return cols, recs, summary


# ---------------------------------------------------------------------------
# estimator comparison


def compare_estimators(dist: DistributionSpec, n: int, delta: float, trials: int, seed: int,
                       k: Optional[int] = None, workers: int = 1) -> dict:
    """Deviation quantiles of the empirical, truncated and centered truncated means.

    All three estimators see identical samples. The truncated estimators use
    the true second moment (and variance for the centered one) as bounds.
    Returns ``{"quantiles": {estimator: {q: value}}, "records": [...]}``.
    """
    mean = _need(dist.mean, "mean", dist)
    m2 = _need(dist.second_moment, "second moment", dist)
    var = _need(dist.variance, "variance", dist)
    rm = RobustMeanConfig(delta=delta, m2_bound=m2)
    k = n // 2 if k is None else k

    def trial(i):
        x = sample(dist, n, seed, i)
        return {"trial": i,
                "empirical_mean": abs(float(np.mean(x)) - mean),
                "truncated": abs(estimate(x, rm).estimate - mean),
                "centered": abs(estimate_centered(x, rm, k=k, var_bound=var).estimate - mean)}

    recs = _map_trials(trial, trials, workers)
    return {"quantiles": {name: _quantiles([r[name] for r in recs])
                          for name in ("empirical_mean", "truncated", "centered")},
            "records": recs}


def _compare(cfg: ExperimentConfig):
    dist = _distribution(cfg)
    res = compare_estimators(dist, cfg.n, cfg.delta, cfg.trials, cfg.seed,
                             k=cfg.params.get("k"), workers=cfg.workers)
    summary = {"distribution": str(dist), "abs_deviation_quantiles": res["quantiles"]}
    return ["trial", "empirical_mean", "truncated", "centered"], res["records"], summary


_RUNNERS = {
    ExperimentKind.COVERAGE: _coverage,
    ExperimentKind.CENTERED_COVERAGE: _centered_coverage,
    ExperimentKind.LEMMA31: _lemma31,
    ExperimentKind.CHERNOFF: _chernoff,
    ExperimentKind.COUNTABLE_BOUND: _countable,
    ExperimentKind.BOUNDED_LOSS_BOUND: _bounded_loss,
    ExperimentKind.UNCOUNTABLE_BOUND: _uncountable,
    ExperimentKind.GIBBS_COMPARE: _gibbs_compare,
    ExperimentKind.IDENTITY_CHECK: _identity_check,
    ExperimentKind.COMPARE: _compare,
}


def run(config: ExperimentConfig) -> RunResult:
    """Run one experiment; write ``trials.csv`` and ``summary.json`` when ``config.out`` is set."""
    cols, recs, summary = _RUNNERS[config.experiment](config)
    summary = dict(summary, experiment=config.experiment.value, config=config.to_dict(),
                   config_hash=config.config_hash(), generator_version=GENERATOR_VERSION)
    summary["config"].pop("out", None)
    if config.out_dir is not None:
        write_trials_csv(config.out_dir / "trials.csv", cols, recs)
        write_summary_json(config.out_dir / "summary.json", summary)
    return RunResult(columns=cols, records=recs, summary=summary)
