"""scikit-learn estimators wrapping the exact sparse solver and the lasso baselines."""
import numpy as np
from scipy.special import expit
from sklearn.base import BaseEstimator, ClassifierMixin
from sklearn.feature_selection import SelectorMixin
from sklearn.utils.multiclass import unique_labels
from sklearn.utils.validation import check_is_fitted, validate_data

from .dataset import Dataset
from .lasso import LassoBudgetError, fit_lasso_logistic, fit_lasso_svm, nonzero_mask
from .losses import Loss, as_loss
from .master import DEFAULT_NODE_LIMIT
from .oa import FitOptions, fit_sparse


class _LinearBinary(SelectorMixin, ClassifierMixin, BaseEstimator):
    """Shared prediction code for sparse linear binary classifiers."""

    def _encode(self, X, y):
        X, y = validate_data(self, X, y, dtype=np.float64)
        self.classes_ = unique_labels(y)
        if self.classes_.size != 2:
            raise ValueError(f"need exactly two classes, got {self.classes_.size}")
        return Dataset(X, np.where(y == self.classes_[1], 1.0, -1.0))

    def decision_function(self, X):
        check_is_fitted(self, "coef_")
        X = validate_data(self, X, reset=False, dtype=np.float64)
        return X @ self.coef_.ravel() + self.intercept_[0]

    def predict(self, X):
        return self.classes_[(self.decision_function(X) > 0).astype(int)]

    def _get_support_mask(self):
        check_is_fitted(self, "coef_")
        return nonzero_mask(self.coef_.ravel())

    def _set_coef(self, w, b):
        self.coef_ = np.asarray(w, dtype=float).reshape(1, -1)
        self.intercept_ = np.array([float(b)])


class SparseClassifier(_LinearBinary):
    """Linear classifier with at most ``k`` nonzero weights, solved exactly.

    Minimizes ``sum_i loss(y_i, w'x_i + b) + ||w||^2 / (2 gamma)`` subject
    to ``||w||_0 <= k`` by outer approximation over the support.

    Parameters
    ----------
    k : int
        Sparsity budget.
    gamma : float, optional
        Ridge parameter; ``None`` scales it with the sample size.
    loss : {"logistic", "hinge", "squared_hinge"}
    max_cuts, node_limit : int
        Budgets of the outer loop and of each master solve.
    tol : float
        Inner dual tolerance.

    Attributes
    ----------
    coef_ : ndarray of shape (1, n_features)
    intercept_ : ndarray of shape (1,)
    certified_ : bool
        Whether the optimality gap closed within the budgets.
    result_ : FitResult
    """

    def __init__(self, k=10, gamma=None, loss="logistic", max_cuts=200,
                 node_limit=DEFAULT_NODE_LIMIT, tol=1e-8):
        self.k = k
        self.gamma = gamma
        self.loss = loss
        self.max_cuts = max_cuts
        self.node_limit = node_limit
        self.tol = tol

    def fit(self, X, y):
        data = self._encode(X, y)
        k = min(int(self.k), data.p)
        opts = FitOptions(gamma=self.gamma, kind=self.loss, max_cuts=self.max_cuts,
                          node_limit=self.node_limit, inner_tol=self.tol)
        res = fit_sparse(data, k, opts)
        self._set_coef(res.w, res.b)
        self.certified_ = res.certified
        self.objective_ = res.objective
        self.cuts_used_ = res.cuts_used
        self.gamma_ = res.gamma
        self.result_ = res
        return self

    def predict_proba(self, X):
        if as_loss(self.loss) is not Loss.LOGISTIC:
            raise AttributeError("probabilities are only defined for the logistic loss")
        p = expit(self.decision_function(X))
        return np.column_stack([1 - p, p])


class LassoClassifier(_LinearBinary):
    """L1-penalized logistic regression or L1-SVM (Huber-smoothed).

    Parameters
    ----------
    lam : float
        Penalty on ``||w||_1``; the intercept is not penalized.
    loss : {"logistic", "hinge"}
    tol : float, optional
        First-order residual target; the solver default when ``None``.
    """

    def __init__(self, lam=1.0, loss="logistic", tol=None):
        self.lam = lam
        self.loss = loss
        self.tol = tol

    def fit(self, X, y):
        data = self._encode(X, y)
        kind = as_loss(self.loss)
        if kind is Loss.SQUARED_HINGE:
            raise ValueError("the lasso baseline supports logistic and hinge")
        fn = fit_lasso_logistic if kind is Loss.LOGISTIC else fit_lasso_svm
        kw = {} if self.tol is None else {"tol": self.tol}
        try:
            fit = fn(data, self.lam, **kw)
            self.converged_ = True
        except LassoBudgetError as err:
            fit = err.best
            self.converged_ = False
        self._set_coef(fit.w, fit.b)
        self.result_ = fit
        return self
