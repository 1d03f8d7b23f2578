import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from exactsparse.datagen import (
    SyntheticConfig,
    gen_features,
    gen_labels,
    gen_truth,
    make_instance,
    make_validation,
    sign,
)


def test_config_validation():
    with pytest.raises(ValueError):
        SyntheticConfig(n=10, p=5, k_true=6)
    with pytest.raises(ValueError):
        SyntheticConfig(n=10, p=5, k_true=2, rho=1.0)
    with pytest.raises(ValueError):
        SyntheticConfig(n=10, p=5, k_true=2, label_model="probit")
    with pytest.raises(ValueError):
        SyntheticConfig(n=10, p=5, k_true=2, snr=0.0)


def test_features_standardized():
    X = gen_features(300, 20, 0.3, seed=1)
    assert np.abs(X.mean(axis=0)).max() <= 1e-12
    assert np.abs(X.var(axis=0) - 1).max() <= 1e-12


def test_independent_columns_uncorrelated():
    n = 2000
    X = gen_features(n, 30, 0.0, seed=2)
    C = np.corrcoef(X, rowvar=False)[np.triu_indices(30, 1)]
    assert np.mean(np.abs(C) <= 4 / math.sqrt(n)) >= 0.95


def test_adjacent_correlation():
    n = 5000
    X = gen_features(n, 20, 0.3, seed=3)
    adj = [np.corrcoef(X[:, j], X[:, j + 1])[0, 1] for j in range(19)]
    assert np.all(np.abs(np.array(adj) - 0.3) <= 5 / math.sqrt(n))


def test_truth_examples():
    np.testing.assert_array_equal(gen_truth(5, 5, "binary", seed=0), np.ones(5))
    w = gen_truth(50, 7, "pm1", seed=1)
    assert np.count_nonzero(w) == 7
    assert set(w[w != 0]) <= {-1.0, 1.0}


def test_truth_positions_uniform():
    p, k, draws = 20, 4, 10_000
    rng = np.random.default_rng(4)
    counts = np.zeros(p)
    for _ in range(draws):
        counts += gen_truth(p, k, seed=rng) != 0
    freq = counts / draws
    sd = math.sqrt((k / p) * (1 - k / p) / draws)
    assert np.all(np.abs(freq - k / p) <= 3 * sd)


def test_sign_convention():
    np.testing.assert_array_equal(sign([-1.0, 0.0, 2.0]), [-1.0, -1.0, 1.0])


def test_noiseless_sign_labels():
    inst = make_instance(SyntheticConfig(n=200, p=10, k_true=3, label_model="sign", seed=5))
    np.testing.assert_array_equal(inst.data.y, sign(inst.data.X @ inst.w_true))
    np.testing.assert_array_equal(inst.epsilon, 0.0)
    assert math.isinf(inst.achieved_snr)


@given(snr=st.floats(0.1, 100.0), seed=st.integers(0, 1000))
@settings(max_examples=30, deadline=None)
def test_snr_exact(snr, seed):
    inst = make_instance(SyntheticConfig(n=50, p=8, k_true=3, snr=snr, seed=seed))
    assert inst.achieved_snr == pytest.approx(snr, rel=1e-12)


def test_logistic_label_calibration():
    n = 200_000
    rng = np.random.default_rng(6)
    X = rng.standard_normal((n, 1))
    cfg = SyntheticConfig(n=n, p=1, k_true=1)
    y, _ = gen_labels(X, np.array([1.5]), cfg, seed=7)
    m = 1.5 * X[:, 0]
    edges = np.linspace(-3, 3, 13)
    for lo, hi in zip(edges[:-1], edges[1:]):
        sel = (m >= lo) & (m < hi)
        if sel.sum() < 500:
            continue
        expect = np.mean(1 / (1 + np.exp(-m[sel])))
        got = np.mean(y[sel] > 0)
        assert abs(got - expect) <= 3 * math.sqrt(expect * (1 - expect) / sel.sum())


def test_binary_truth_uses_raw_noise():
    cfg = SyntheticConfig(n=5000, p=6, k_true=2, label_model="sign", truth_model="binary",
                          sigma2=0.25, seed=8)
    inst = make_instance(cfg)
    assert inst.epsilon.std() == pytest.approx(0.5, rel=0.05)
    # no standardization in the theory model
    assert np.abs(inst.data.X.mean(axis=0)).max() > 1e-6
    np.testing.assert_array_equal(inst.data.y, sign(inst.data.X @ inst.w_true + inst.epsilon))


def test_reproducible():
    cfg = SyntheticConfig(n=40, p=15, k_true=3, rho=0.3, snr=4.0, seed=11)
    a, b = make_instance(cfg), make_instance(cfg)
    np.testing.assert_array_equal(a.data.X, b.data.X)
    np.testing.assert_array_equal(a.data.y, b.data.y)
    np.testing.assert_array_equal(a.w_true, b.w_true)


def test_label_symmetry():
    rng = np.random.default_rng(9)
    X = rng.standard_normal((300, 5))
    w = np.array([1.0, 0, -1.0, 0, 1.0])
    cfg = SyntheticConfig(n=300, p=5, k_true=3, label_model="sign")
    y, _ = gen_labels(X, w, cfg)
    y_neg, _ = gen_labels(X, -w, cfg)
    # ties at exactly zero have probability zero for continuous features
    np.testing.assert_array_equal(y_neg, -y)


def test_single_class_flagged():
    cfg = SyntheticConfig(n=3, p=2, k_true=0, label_model="sign", seed=0)
    with pytest.warns(RuntimeWarning):
        inst = make_instance(cfg)
    assert inst.single_class


def test_validation_sample_shares_truth():
    inst = make_instance(SyntheticConfig(n=50, p=10, k_true=2, seed=3))
    val = make_validation(inst, 30)
    assert val.X.shape == (30, 10)
    assert not np.array_equal(val.X[:30], inst.data.X[:30])
    again = make_validation(inst, 30)
    np.testing.assert_array_equal(val.X, again.X)
