"""Tests for distributions, samplers and synthetic learning problems."""

import json
import math
import threading

import numpy as np
import pytest
from scipy import integrate, stats

from robust_pacbayes.errors import CapabilityError, ConfigurationError
from robust_pacbayes.rng import GENERATOR_VERSION, composite_index, stream
from robust_pacbayes.synthetic import (DistributionSpec, LearningProblem, LossKind, MomentCache,
                                       analytic_moments, analytic_risk, bernoulli, lognormal, normal,
                                       pareto, point_mass, sample, student_t)

# scipy frozen laws used as independent oracles for the declared moments
ORACLES = [
    (normal(0.3, 2.0), stats.norm(0.3, 2.0)),
    (lognormal(0.0, 1.0), stats.lognorm(1.0)),
    (lognormal(0.2, 0.5), stats.lognorm(0.5, scale=math.exp(0.2))),
    (pareto(4.0), stats.pareto(4.0)),
    (pareto(2.5, 2.0), stats.pareto(2.5, scale=2.0)),
    (student_t(5.0), stats.t(5.0)),
    (student_t(2.5).with_second_moment(1.0), stats.t(2.5, scale=math.sqrt(0.2))),
]


def _quad(f, law):
    lo, hi = law.support()
    return integrate.quad(lambda x: f(x) * law.pdf(x), lo, hi, limit=400, epsabs=1e-12, epsrel=1e-10)[0]


def test_point_mass_sample():
    assert np.array_equal(sample(point_mass(2.5), 7, 0), np.full(7, 2.5))


def test_normal_location_and_scale_are_sampled():
    x = sample(normal(3.0, 0.5), 200_000, 1)
    assert x.mean() == pytest.approx(3.0, abs=5 * 0.5 / math.sqrt(2e5))
    assert x.std() == pytest.approx(0.5, rel=0.01)


@pytest.mark.parametrize("dist", [d for d, _ in ORACLES] + [bernoulli(0.3)], ids=str)
def test_sample_matches_law(dist):
    # Kolmogorov-Smirnov against the analytic cdf
    x = sample(dist, 20_000, 3)
    if dist.family.value == "Bernoulli":
        assert x.mean() == pytest.approx(0.3, abs=5 * math.sqrt(0.21 / 20_000))
        return
    res = stats.kstest(x, lambda t: np.array([dist.cdf(v) for v in np.atleast_1d(t)]))
    assert res.pvalue > 1e-4


@pytest.mark.parametrize("dist, law", ORACLES, ids=lambda v: str(v) if isinstance(v, DistributionSpec) else "")
def test_declared_moments_match_quadrature(dist, law):
    assert dist.mean == pytest.approx(_quad(lambda x: x, law), rel=1e-7)
    assert dist.second_moment == pytest.approx(_quad(lambda x: x * x, law), rel=1e-6)
    assert dist.second_moment == pytest.approx(dist.variance + dist.mean**2, rel=1e-12)
    if dist.third_abs_moment is not None:
        assert dist.third_abs_moment == pytest.approx(_quad(lambda x: abs(x) ** 3, law), rel=1e-6)


def test_pareto_lognormal_formulas():
    assert pareto(4.0).mean == pytest.approx(4.0 / 3.0, rel=1e-15)
    assert lognormal(0.0, 1.0).second_moment == pytest.approx(math.e**2, rel=1e-15)
    assert pareto(2.5).centered().mean == pytest.approx(0.0, abs=1e-14)


def test_infinite_moments_are_absent():
    assert student_t(2.5).third_abs_moment is None
    assert pareto(2.5).third_abs_moment is None
    assert student_t(1.5).second_moment is None
    assert pareto(0.8).mean is None
    with pytest.raises(CapabilityError):
        pareto(0.8).centered()


@pytest.mark.parametrize("family, params", [
    ("Pareto", {"alpha": 0.0, "xm": 1.0}),
    ("Pareto", {"alpha": -1.0, "xm": 1.0}),
    ("Normal", {"mean": 0.0, "sd": 0.0}),
    ("StudentT", {"nu": -2.0}),
    ("Bernoulli", {"p": 1.5}),
    ("LogNormal", {"mu": 0.0}),
])
def test_invalid_parameters(family, params):
    with pytest.raises(ConfigurationError):
        DistributionSpec(family, tuple(params.items()))


def test_seed_determinism():
    d = student_t(2.5)
    assert np.array_equal(sample(d, 100, 5, 3), sample(d, 100, 5, 3))
    assert not np.array_equal(sample(d, 100, 5, 3), sample(d, 100, 5, 4))
    assert not np.array_equal(sample(d, 100, 5, 3), sample(d, 100, 6, 3))
    with pytest.raises(ConfigurationError):
        sample(d, 0, 1)


def test_generator_is_philox():
    assert GENERATOR_VERSION.startswith("philox4x64-10")
    assert isinstance(stream(1, 2).bit_generator, np.random.Philox)
    assert composite_index(3, 4) != composite_index(4, 3)


def test_serialization_roundtrip():
    d = pareto(2.5).centered().shifted(1e3).scaled(2.0)
    assert DistributionSpec.from_dict(json.loads(json.dumps(d.to_dict()))) == d
    prob = LearningProblem(d, LossKind.ABSOLUTE, (0.0, 1.0))
    assert LearningProblem.from_dict(prob.to_dict()) == prob


# -- learning problems --------------------------------------------------------

def test_squared_normal_risk():
    prob = LearningProblem(normal(0.0, 1.0), LossKind.SQUARED, (0.0, 2.0))
    assert analytic_risk(prob, 0.0) == pytest.approx(1.0, abs=1e-15)
    assert analytic_risk(prob, 2.0) == pytest.approx(5.0, abs=1e-14)
    assert analytic_risk(prob, 2.0) == pytest.approx(_quad(lambda z: (2 - z) ** 2, stats.norm()), rel=1e-10)


def test_squared_risk_convex_with_mean_minimizer():
    d = lognormal(0.0, 1.0)
    grid = np.linspace(0.0, 3.5, 36)
    prob = LearningProblem(d, LossKind.SQUARED, tuple(grid))
    r = prob.truth().risk
    assert np.all(np.diff(r, 2) > 0)
    assert abs(grid[np.argmin(r)] - d.mean) <= 0.05


@pytest.mark.parametrize("dist, law", [ORACLES[0], ORACLES[1], ORACLES[3]], ids=["normal", "lognormal", "pareto"])
@pytest.mark.parametrize("theta", [-0.5, 0.7, 1.6])
def test_absolute_moments_quadrature(dist, law, theta):
    prob = LearningProblem(dist, LossKind.ABSOLUTE, (theta,))
    m = prob.analytic_moments(theta)
    assert m.risk == pytest.approx(_quad(lambda z: abs(theta - z), law), rel=1e-7)
    assert m.m2 == pytest.approx(_quad(lambda z: (theta - z) ** 2, law), rel=1e-7)
    assert m.m3 == pytest.approx(_quad(lambda z: abs(theta - z) ** 3, law), rel=1e-6)
    m2, m3, var = analytic_moments(prob, theta)
    assert var == pytest.approx(m2 - m.risk**2, rel=1e-12)


def test_third_moment_capability_error():
    prob = LearningProblem(student_t(2.5), LossKind.ABSOLUTE, (0.0, 1.0))
    with pytest.raises(CapabilityError, match=r"E\|z\|\^3"):
        analytic_moments(prob, 0.3)
    assert prob.analytic_moments(0.3, require_third=False).m3 is None
    with pytest.raises(CapabilityError):
        LearningProblem(student_t(1.5), LossKind.ABSOLUTE, (0.0,)).analytic_moments(0.0, False)


def test_zero_one_risk():
    prob = LearningProblem(normal(0.3, 1.0), LossKind.ZERO_ONE, (-1.0, 0.0, 1.0))
    p_neg = stats.norm.cdf(-0.3)
    assert prob.truth().risk == pytest.approx([1 - p_neg, p_neg, p_neg], rel=1e-12)
    L = prob.loss_matrix([-2.0, 0.0, 2.0])
    assert L.tolist() == [[0.0, 1.0, 1.0], [1.0, 0.0, 0.0], [1.0, 0.0, 0.0]]


def test_monte_carlo_fallback_and_cache(tmp_path):
    cache = MomentCache(tmp_path / "m.json")
    prob = LearningProblem(student_t(7.0), LossKind.ABSOLUTE, (0.5,), mc_samples=200_000, cache=cache)
    m = prob.analytic_moments(0.5)
    assert "risk" in m.se and "m3" in m.se
    law = stats.t(7.0)
    assert m.risk == pytest.approx(_quad(lambda z: abs(0.5 - z), law), abs=5 * m.se["risk"])
    on_disk = json.loads((tmp_path / "m.json").read_text())
    assert all(rec["generator_version"] == GENERATOR_VERSION for rec in on_disk.values())
    again = LearningProblem(student_t(7.0), LossKind.ABSOLUTE, (0.5,), mc_samples=200_000,
                            cache=MomentCache(tmp_path / "m.json"))
    assert again.analytic_moments(0.5) == m


def test_cache_ignores_other_generator(tmp_path):
    path = tmp_path / "m.json"
    path.write_text(json.dumps({"k": {"value": 1.0, "generator_version": "other"}}))
    assert MomentCache(path).get("k") is None


def test_cache_concurrent_writers(tmp_path):
    cache = MomentCache(tmp_path / "m.json")

    def put(i):
        cache.put(f"k{i}", {"value": float(i)})

    threads = [threading.Thread(target=put, args=(i,)) for i in range(16)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    fresh = MomentCache(tmp_path / "m.json")
    assert all(fresh.get(f"k{i}")["value"] == float(i) for i in range(16))


@pytest.mark.slow
@pytest.mark.parametrize("dist", [pareto(4.0), lognormal(0.0, 1.0), normal(0.3, 2.0),
                                  student_t(2.5).with_second_moment(1.0)], ids=str)
def test_declared_moments_monte_carlo(dist):
    x = sample(dist, 10**7, 20190508)
    for k, declared in ((1, dist.mean), (2, dist.second_moment)):
        # the standard error of mean(x^k) only exists when E|x|^(2k) is finite
        if not dist.abs_moment_finite(2 * k):
            continue
        v = x**k
        se = v.std() / math.sqrt(v.size)
        assert abs(v.mean() - declared) <= 5 * se
