"""Tests for discrete information-theoretic primitives."""

import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays

from robust_pacbayes.errors import ArgumentError, ConfigurationError
from robust_pacbayes.info import (WeightVector, check_lemma31_empirical, chernoff_bernoulli_tail,
                                  exponential_tilt, kl_bernoulli, kl_divergence, log_partition)
from robust_pacbayes.rng import stream
from robust_pacbayes.synthetic import lognormal, point_mass

probs = st.floats(min_value=0.0, max_value=1.0)


@st.composite
def finite_instances(draw, max_size=16):
    size = draw(st.integers(2, max_size))
    logits = draw(arrays(float, size, elements=st.floats(-20, 20)))
    h = draw(arrays(float, size, elements=st.floats(-50, 50)))
    return WeightVector.from_log(logits), h


# -- WeightVector ------------------------------------------------------------

def test_weight_vector_validation():
    with pytest.raises(ArgumentError):
        WeightVector([0.5, 0.6])
    with pytest.raises(ArgumentError):
        WeightVector([1.5, -0.5])
    with pytest.raises(ArgumentError):
        WeightVector([])
    w = WeightVector.uniform(4)
    assert np.array_equal(np.asarray(w), np.full(4, 0.25))
    assert w.expect([1, 2, 3, 4]) == 2.5
    with pytest.raises(ValueError):
        w.weights[0] = 1.0


def test_from_log_zero_mass():
    w = WeightVector.from_log([0.0, -np.inf, 0.0])
    assert list(w.support) == [0, 2]
    assert w[1] == 0.0


# -- KL ----------------------------------------------------------------------

def test_kl_examples():
    assert kl_divergence([0.3, 0.7], [0.3, 0.7]) == 0.0
    assert kl_divergence([1.0, 0.0], [0.5, 0.5]) == pytest.approx(math.log(2.0), abs=1e-15)
    assert kl_divergence([0.5, 0.5], [1.0, 0.0]) == math.inf
    with pytest.raises(ArgumentError):
        kl_divergence([1.0], [0.5, 0.5])


def test_kl_bernoulli_examples():
    assert kl_bernoulli(0.5, 0.5) == 0.0
    oracle = 0.75 * math.log(1.5) + 0.25 * math.log(0.5)
    assert kl_bernoulli(0.75, 0.5) == pytest.approx(oracle, abs=1e-15)
    assert kl_bernoulli(0.75, 0.5) == pytest.approx(0.1308120359, abs=1e-10)
    assert 2 * 0.25**2 <= kl_bernoulli(0.75, 0.5)
    with pytest.raises(ArgumentError):
        kl_bernoulli(1.2, 0.5)


@given(probs, probs)
def test_kl_bernoulli_pinsker(p, q):
    assert kl_bernoulli(p, q) >= 2.0 * (p - q) ** 2 - 1e-12


@given(finite_instances(), st.data())
def test_kl_nonnegative(inst, data):
    pi, _ = inst
    rho = WeightVector.from_log(data.draw(arrays(float, len(pi), elements=st.floats(-20, 20))))
    assert kl_divergence(rho, pi) >= 0.0
    assert kl_divergence(pi, pi) == pytest.approx(0.0, abs=1e-12)


# -- Chernoff ----------------------------------------------------------------

def test_chernoff_values():
    assert chernoff_bernoulli_tail(100, 0.1) == pytest.approx(math.exp(-2.0), abs=1e-15)
    assert chernoff_bernoulli_tail(10, 1e-9) == pytest.approx(1.0)
    with pytest.raises(ArgumentError):
        chernoff_bernoulli_tail(0, 0.1)
    with pytest.raises(ArgumentError):
        chernoff_bernoulli_tail(10, 0.0)


def test_chernoff_empirical():
    trials, n, theta, eps = 100_000, 50, 0.3, 0.15
    counts = stream(11, 0).binomial(n, theta, size=trials)
    f = float(np.mean(counts / n - theta > eps))
    se = math.sqrt(f * (1 - f) / trials)
    bound = chernoff_bernoulli_tail(n, eps)
    assert bound == pytest.approx(0.105, abs=1e-3)
    assert f <= bound + 3 * se


# -- log partition and tilt --------------------------------------------------

def test_log_partition_examples():
    assert log_partition([0.2, 0.8], [0.0, 0.0]) == 0.0
    assert log_partition([0.5, 0.5], [1.0, 0.0]) == pytest.approx(math.log((math.e + 1) / 2), abs=1e-15)
    assert log_partition([0.5, 0.5], [1.0, 0.0]) == pytest.approx(0.6201145, abs=1e-7)


def test_log_partition_shift_invariance():
    pi, h = [0.5, 0.5], np.array([1.0, 0.0])
    assert log_partition(pi, h + 1e6) == pytest.approx(log_partition(pi, h) + 1e6, rel=1e-15)


def test_log_partition_ignores_off_support():
    assert log_partition([1.0, 0.0], [2.0, np.inf]) == 2.0
    with pytest.raises(ArgumentError):
        log_partition([0.5, 0.5], [2.0, np.inf])


def test_tilt_examples():
    pi = WeightVector([0.5, 0.5])
    assert exponential_tilt(pi, [3.0, 3.0]).weights == pytest.approx(pi.weights, abs=1e-15)
    star = exponential_tilt(pi, [1.0, 0.0])
    e = math.e
    assert star.weights == pytest.approx([e / (e + 1), 1 / (e + 1)], abs=1e-15)
    assert star.weights == pytest.approx([0.7310586, 0.2689414], abs=1e-7)


def test_variational_identity_grid():
    pi = WeightVector([0.3, 0.7])
    h = np.array([1.7, -0.4])
    t = np.linspace(0.0, 1.0, 1_000_001)
    rho = np.column_stack([t, 1 - t])
    with np.errstate(divide="ignore", invalid="ignore"):
        ent = np.where(rho > 0, rho * np.log(rho / pi.weights), 0.0).sum(axis=1)
    vals = rho @ h - ent
    lp = log_partition(pi, h)
    assert 0.0 <= lp - vals.max() <= 1e-6
    star = exponential_tilt(pi, h)
    assert abs(rho[np.argmax(vals), 0] - star[0]) < 2e-6


@given(finite_instances())
def test_tilt_attains_log_partition(inst):
    pi, h = inst
    star = exponential_tilt(pi, h)
    lp = log_partition(pi, h)
    assert star.expect(h) - kl_divergence(star, pi) == pytest.approx(lp, abs=1e-9 * (1 + abs(lp)))
    assert math.fsum(star.weights) == pytest.approx(1.0, abs=1e-12)
    assert lp >= pi.expect(h) - 1e-9 * (1 + abs(lp))


# -- strategic-noise inequality ----------------------------------------------

def test_lemma31_point_mass():
    rep = check_lemma31_empirical(point_mass(0.0), 30, 1.0, (0.5, 0.9), 0.05, trials=50)
    assert rep.frequency == 1.0
    assert np.all(rep.lhs == 0.0)
    assert np.all(rep.rhs >= math.log(20.0) / 30)


def test_lemma31_lognormal():
    rep = check_lemma31_empirical(lognormal(0, 1), 200, 10.0, (0.5, 0.9), 0.05, trials=10_000, seed=3)
    assert rep.per_theta[0.5] >= 0.95 - 3 * rep.se
    assert rep.passed
    assert rep.lhs.shape == (10_000, 2)


def test_lemma31_validation():
    with pytest.raises(ConfigurationError):
        check_lemma31_empirical(lognormal(0, 1), 10, 1.0, theta=1.0)
    with pytest.raises(ConfigurationError):
        check_lemma31_empirical(lognormal(0, 1), 10, -1.0)
