import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from exactsparse.dataset import Dataset
from exactsparse.datagen import SyntheticConfig, make_instance
from exactsparse.theory import (
    TheoryParams,
    brute_force_min,
    delta_stat,
    disagreement_prob,
    exact_mean_z,
    failure_tail,
    large_dev_bound,
    mc_disagreement,
    mc_failure_frequency,
    mc_mean_z,
    mc_misclass,
    mc_orthant2,
    mc_orthant3,
    mean_z_lower_bound,
    n0_threshold,
    orthant2,
    orthant3,
    predictions,
    q_of_ell,
)


def within(exact, est, sigmas=3.0):
    mean, se = est
    return abs(mean - exact) <= sigmas * se + 1e-12


def test_params_validation():
    with pytest.raises(ValueError):
        TheoryParams(k=2, ell=3)
    with pytest.raises(ValueError):
        TheoryParams(k=3, ell=1, sigma2=-1.0)
    with pytest.raises(ValueError):
        TheoryParams(k=3, ell=1, p=2)


def test_orthant_examples():
    assert orthant2(0.0) == pytest.approx(0.25)
    assert orthant2(1.0) == pytest.approx(0.5)
    assert orthant3(0, 0, 0) == pytest.approx(0.125)
    assert orthant3(1, 0, 0) == pytest.approx(0.25)


def test_orthant3_rejects_non_psd():
    with pytest.raises(ValueError):
        orthant3(0.9, 0.9, -0.9)


@given(st.floats(-1, 1), st.floats(-1, 1))
def test_orthant3_duplicate_collapses(r, _):
    # variables 1 and 2 identical: rho13 = rho23 = r
    assert orthant3(1.0, r, r) == pytest.approx(orthant2(r), abs=1e-12)
    assert 0.0 <= orthant2(r) <= 1.0


def test_orthant_monte_carlo():
    assert within(orthant2(0.3), mc_orthant2(0.3, 10**6, seed=1))
    assert within(orthant3(0.3, 0.2, 0.1), mc_orthant3(0.3, 0.2, 0.1, 10**6, seed=2))


def test_disagreement_examples():
    w = np.array([1.0, 2.0, 0.0])
    assert disagreement_prob(w, w, 0.0) == pytest.approx(0.0, abs=1e-7)
    assert disagreement_prob(np.array([1.0, 0]), np.array([0, 1.0]), 0.5) == pytest.approx(0.5)
    with pytest.raises(ValueError):
        disagreement_prob(np.zeros(2), w[:2], 0.0)


def test_disagreement_monte_carlo():
    rng = np.random.default_rng(3)
    w, w2 = rng.standard_normal(4), rng.standard_normal(4)
    assert within(disagreement_prob(w, w2, 0.7), mc_disagreement(w, w2, 0.7, 10**6, seed=4))


def test_q_examples():
    assert q_of_ell(TheoryParams(k=4, ell=4)) == pytest.approx(0.0, abs=1e-7)
    assert q_of_ell(TheoryParams(k=4, ell=0, sigma2=2.0)) == pytest.approx(0.5)
    # direct evaluation of the closed form
    assert q_of_ell(TheoryParams(k=30, ell=15, sigma2=1.0)) == pytest.approx(0.33631375270042596,
                                                                             rel=1e-12)


@given(k=st.integers(1, 60), s2=st.floats(0, 5))
def test_q_decreasing_and_concave(k, s2):
    q = np.array([q_of_ell(TheoryParams(k=k, ell=l, sigma2=s2)) for l in range(k + 1)])
    assert np.all(np.diff(q) <= 1e-12)
    assert np.all(np.diff(q, 2) <= 1e-12)


def test_misclass_concentrates_at_q():
    par = TheoryParams(k=4, ell=2, sigma2=0.5)
    q = q_of_ell(par)
    mean, _ = mc_misclass(par, 10**5, seed=5)
    assert abs(mean - q) <= 4 * math.sqrt(q * (1 - q) / 10**5)


def test_mean_z_lower_bound_examples():
    assert mean_z_lower_bound(TheoryParams(k=3, ell=0)) == pytest.approx(1 / math.pi)
    with pytest.raises(ValueError):
        mean_z_lower_bound(TheoryParams(k=3, ell=3))


@given(k=st.integers(1, 40), s2=st.floats(0, 4), data=st.data())
def test_exact_mean_z_dominates_bound(k, s2, data):
    ell = data.draw(st.integers(0, k - 1)) if k > 1 else 0
    par = TheoryParams(k=k, ell=ell, sigma2=s2)
    assert mean_z_lower_bound(par) > 0
    assert exact_mean_z(par) >= mean_z_lower_bound(par) - 1e-12


def test_exact_mean_z_examples_and_mc():
    assert exact_mean_z(TheoryParams(k=3, ell=3, sigma2=1.0)) == pytest.approx(0.0, abs=1e-12)
    par = TheoryParams(k=3, ell=1, sigma2=0.5)
    assert within(exact_mean_z(par), mc_mean_z(par, 10**6, seed=6))


def test_large_dev_bound_examples():
    par = TheoryParams(k=2, ell=1, sigma2=0.25)
    assert large_dev_bound(0, par) == 1.0
    vals = [large_dev_bound(n, par) for n in range(0, 200, 10)]
    assert np.all(np.diff(vals) < 0)
    with pytest.raises(ValueError):
        large_dev_bound(5, TheoryParams(k=2, ell=2))


def test_n0_examples():
    assert n0_threshold(30, 1000, 0.0) == 24436
    assert n0_threshold(1, 2, 0.0) == 0
    with pytest.raises(ValueError):
        n0_threshold(3, 5, 0.0)
    raw = lambda s2: 6 * math.pi**2 * (2 + s2) * 3 * math.log(7)
    assert raw(2.0) == pytest.approx(2 * raw(0.0))


def test_failure_tail_examples():
    n0 = n0_threshold(2, 6, 0.25)
    assert failure_tail(n0, 2, 6, 0.25) == 1.0
    assert failure_tail(n0 + 10, 2, 6, 0.25) < failure_tail(n0 + 5, 2, 6, 0.25)
    with pytest.raises(ValueError):
        failure_tail(n0 - 1, 2, 6, 0.25)


def test_brute_force_examples():
    inst = make_instance(SyntheticConfig(n=2000, p=8, k_true=3, label_model="sign",
                                         truth_model="binary", seed=1))
    np.testing.assert_array_equal(np.flatnonzero(brute_force_min(inst.data, 3)), inst.support)
    np.testing.assert_array_equal(brute_force_min(inst.data, 8), np.ones(8))
    with pytest.raises(ValueError):
        brute_force_min(Dataset(np.ones((2, 40)), np.array([1.0, -1.0])), 20)


def test_brute_force_single_sample():
    X = np.array([[1.0, -2.0, 0.5], [0.0, 0.0, 0.0]])
    data = Dataset(X, np.array([1.0, -1.0]))
    s = brute_force_min(data, 1)
    # lexicographically first zero-error support: column 0 predicts +1 and
    # a zero score predicts -1
    np.testing.assert_array_equal(s, [1, 0, 0])


def test_brute_force_recovers_in_most_seeds():
    hits = 0
    for seed in range(20):
        inst = make_instance(SyntheticConfig(n=500, p=6, k_true=2, label_model="sign",
                                             truth_model="binary", seed=seed))
        hits += set(np.flatnonzero(brute_force_min(inst.data, 2))) == set(inst.support)
    assert hits >= 19


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 10_000))
def test_delta_properties(seed):
    rng = np.random.default_rng(seed)
    X = rng.standard_normal((50, 5))
    y = np.where(rng.random(50) < 0.5, 1.0, -1.0)
    y[:2] = [1.0, -1.0]
    data = Dataset(X, y)
    w1 = (rng.random(5) < 0.5).astype(float)
    w2 = (rng.random(5) < 0.5).astype(float)
    d = delta_stat(data, w1, w2)
    assert delta_stat(data, w1, w1).value == 0.0
    assert d.value == pytest.approx(-delta_stat(data, w2, w1).value)
    assert d.value == pytest.approx((d.z_counts[1] - d.z_counts[-1]) / 50)


@given(st.floats(0.01, 100))
def test_prediction_scale_invariance(lam):
    X = np.random.default_rng(0).standard_normal((30, 4))
    w = np.array([1.0, 0.0, 1.0, 1.0])
    np.testing.assert_array_equal(predictions(X, lam * w), predictions(X, w))


def test_failure_frequency_small():
    n0 = n0_threshold(2, 6, 0.25)
    mean, se = mc_failure_frequency(n0, 2, 6, 0.25, trials=500, seed=7)
    assert mean <= failure_tail(n0, 2, 6, 0.25) + 3 * se
    assert 0.0 <= mean <= 1.0
