import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from exactsparse.dataset import Dataset
from exactsparse.lasso import (
    LassoBudgetError,
    fit_lasso_logistic,
    fit_lasso_svm,
    lambda_grid,
    lambda_max,
    lasso_path,
    nonzero_mask,
    support_size,
)

from conftest import random_dataset


def newton_logistic(X, y, iters=50):
    """Independent oracle: unpenalized logistic regression by Newton/IRLS."""
    A = np.column_stack([X, np.ones(len(y))])
    beta = np.zeros(A.shape[1])
    for _ in range(iters):
        m = y * (A @ beta)
        p = 1.0 / (1.0 + np.exp(m))
        grad = -A.T @ (y * p)
        H = A.T @ (A * (p * (1 - p))[:, None])
        beta -= np.linalg.solve(H, grad)
    return beta[:-1], beta[-1]


def test_nonzero_threshold():
    assert support_size(np.zeros(4)) == 0
    assert support_size(np.array([1.0, 1e-9, -2.0, 0.0])) == 2
    np.testing.assert_array_equal(nonzero_mask([0.0, 3.0]), [False, True])


def test_lambda_max_balanced_formula():
    data = random_dataset(40, 6, 1)
    y = np.array([1.0, -1.0] * 20)
    data = Dataset(data.X, y)
    assert lambda_max(data) == pytest.approx(np.abs(data.X.T @ (y / 2)).max(), rel=1e-12)


@pytest.mark.parametrize("kind", ["logistic", "hinge"])
def test_lambda_max_zeroes_weights(kind):
    data = random_dataset(60, 8, 2)
    top = lambda_max(data, kind)
    fn = fit_lasso_logistic if kind == "logistic" else fit_lasso_svm
    assert fn(data, top).support_size == 0
    # just below the threshold something enters
    assert fn(data, 0.9 * top).support_size >= 1


def test_lambda_grid():
    data = random_dataset(30, 4, 3)
    grid = lambda_grid(data, 2)
    assert grid[0] == pytest.approx(lambda_max(data))
    assert grid[1] == pytest.approx(1e-4 * lambda_max(data))
    g = lambda_grid(data, 12)
    assert np.all(np.diff(g) < 0)
    with pytest.raises(ValueError):
        lambda_grid(data, 1)


def test_unpenalized_matches_newton():
    rng = np.random.default_rng(4)
    X = rng.standard_normal((200, 3))
    y = np.where(rng.random(200) < 1 / (1 + np.exp(-(X @ [1.0, -0.5, 0.2]))), 1.0, -1.0)
    data = Dataset(X, y)
    fit = fit_lasso_logistic(data, 0.0, tol=1e-9)
    w, b = newton_logistic(X, y)
    np.testing.assert_allclose(fit.w, w, atol=1e-4)
    assert fit.b == pytest.approx(b, abs=1e-4)


def test_duplicated_rows_double_lambda():
    data = random_dataset(50, 6, 5)
    twice = Dataset(np.vstack([data.X, data.X]), np.concatenate([data.y, data.y]))
    a = fit_lasso_logistic(data, 2.0, tol=1e-9)
    b = fit_lasso_logistic(twice, 4.0, tol=1e-9)
    np.testing.assert_allclose(a.w, b.w, atol=1e-6)


@pytest.mark.parametrize("kind", ["logistic", "hinge"])
def test_objective_monotone_and_fixed_point(kind):
    data = random_dataset(80, 10, 6)
    lam = 0.3 * lambda_max(data, kind)
    trace = []
    if kind == "logistic":
        fit = fit_lasso_logistic(data, lam, trace=trace)
        tol = 1e-6
    else:
        fit = fit_lasso_svm(data, lam, trace=trace, mu_final=1e-2)
        tol = 1e-4
    steps = np.diff(trace)
    if kind == "hinge":
        # continuation changes the smoothed objective between stages; check
        # monotonicity within the final stage only
        steps = steps[-fit.iterations // 4:]
    assert np.all(steps <= 1e-12 * (1 + np.abs(trace[0])))
    if kind == "logistic":
        u = data.X @ fit.w + fit.b
        g = data.X.T @ (-data.y / (1 + np.exp(data.y * u)))
        zero = fit.w == 0
        assert np.all(np.abs(g[zero]) <= lam + tol)


def test_huge_lambda_svm_majority_intercept():
    X = np.random.default_rng(0).standard_normal((10, 3))
    y = np.array([1.0] * 7 + [-1.0] * 3)
    fit = fit_lasso_svm(Dataset(X, y), 1e6)
    assert fit.support_size == 0
    assert fit.b == pytest.approx(1.0, abs=1e-3)


def test_separable_svm_zero_training_error():
    rng = np.random.default_rng(7)
    X = rng.standard_normal((60, 2))
    y = np.where(X[:, 0] + 0.5 * X[:, 1] > 0, 1.0, -1.0)
    X = X + 0.3 * y[:, None] * np.array([1.0, 0.5])  # open a margin
    fit = fit_lasso_svm(Dataset(X, y), 0.01)
    pred = np.where(X @ fit.w + fit.b > 0, 1.0, -1.0)
    assert np.all(pred == y)


def test_hand_instance_svm_matches_grid():
    data = Dataset(np.array([[1.0], [-2.0]]), np.array([1.0, -1.0]))
    fit = fit_lasso_svm(data, 0.5)
    # 2-D grid oracle over (w, b); the exact optimum is 1/3 at w = 2/3
    assert fit.objective == pytest.approx(1.0 / 3.0, abs=1e-3)
    assert fit.mu == pytest.approx(1e-4)


def test_budget_error_has_best():
    data = random_dataset(60, 10, 8)
    with pytest.raises(LassoBudgetError) as err:
        fit_lasso_logistic(data, 0.01, tol=1e-12, max_iter=3)
    assert err.value.best.w.shape == (10,)


def test_negative_lambda_rejected():
    with pytest.raises(ValueError):
        fit_lasso_logistic(random_dataset(10, 2, 0), -1.0)


def test_path_is_warm_started_and_ordered():
    data = random_dataset(60, 8, 9)
    lams = lambda_grid(data, 6)[::-1]
    fits = lasso_path(data, lams)
    assert [f.lam for f in fits] == sorted(lams, reverse=True)
    assert fits[0].support_size == 0
    assert len(fits[-1].path) == 6


@settings(max_examples=20, deadline=None)
@given(seed=st.integers(0, 10_000), frac=st.floats(0.05, 1.0))
def test_logistic_kkt_property(seed, frac):
    data = random_dataset(40, 6, seed)
    lam = frac * lambda_max(data)
    fit = fit_lasso_logistic(data, lam)
    u = data.X @ fit.w + fit.b
    d = -data.y / (1 + np.exp(data.y * u))
    g = data.X.T @ d
    assert abs(d.sum()) <= 1e-6
    on = fit.w != 0
    np.testing.assert_allclose(g[on], -lam * np.sign(fit.w[on]), atol=1e-6)
    assert np.all(np.abs(g[~on]) <= lam + 1e-6)
