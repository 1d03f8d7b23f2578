"""Support recovery, predictive metrics and validation-set model selection."""
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np
from sklearn.metrics import roc_auc_score
from sklearn.model_selection import train_test_split

from .lasso import LassoBudgetError, fit_lasso_logistic, fit_lasso_svm, lambda_grid, nonzero_mask
from .losses import Loss, as_loss
from .oa import FitOptions, fit_sparse


class UndefinedMetricError(ValueError):
    """The metric is not defined for the given labels."""


@dataclass(frozen=True)
class RecoveryReport:
    accuracy_count: int
    false_count: int
    support_size: int
    perfect: bool


def recovery(w, w_true):
    """Correct and false selections of ``w`` against a planted ``w_true``.

    Nonzero means ``|w_j| > 1e-8 * max|w|``.

    >>> recovery([1.0, 0.0, 2.0], [1.0, 1.0, 0.0])
    RecoveryReport(accuracy_count=1, false_count=1, support_size=2, perfect=False)
    """
    w = np.asarray(w, dtype=float)
    w_true = np.asarray(w_true, dtype=float)
    if w.shape != w_true.shape:
        raise ValueError(f"shape mismatch: {w.shape} vs {w_true.shape}")
    sel = nonzero_mask(w)
    true = w_true != 0
    a = int(np.count_nonzero(sel & true))
    f = int(np.count_nonzero(sel & ~true))
    return RecoveryReport(a, f, a + f, a == int(true.sum()) and f == 0)


def auc(scores, labels):
    """Area under the ROC curve with ties counted as one half."""
    labels = np.asarray(labels, dtype=float)
    if np.unique(labels).size < 2:
        raise UndefinedMetricError("AUC needs both classes among the labels")
    return float(roc_auc_score(labels, np.asarray(scores, dtype=float)))


def misclass_rate(predictions, labels):
    predictions = np.asarray(predictions, dtype=float)
    labels = np.asarray(labels, dtype=float)
    if predictions.shape != labels.shape:
        raise ValueError(f"shape mismatch: {predictions.shape} vs {labels.shape}")
    return float(np.mean(predictions != labels))


def default_gamma_grid(n):
    """Seven log-spaced values over ``[1e-3, 1e3] / n``."""
    return np.logspace(-3.0, 3.0, 7) / n


def split_dataset(data, train_fraction=0.8, seed=0):
    """Stratified train/validation split; rejects splits that lose a class."""
    if not 0.0 < train_fraction < 1.0:
        raise ValueError(f"train_fraction must lie in (0, 1), got {train_fraction}")
    counts = np.unique(data.y, return_counts=True)[1]
    if counts.size < 2 or counts.min() < 2:
        raise ValueError("each class needs at least two samples to split")
    idx = np.arange(data.n)
    tr, va = train_test_split(idx, train_size=train_fraction, random_state=seed,
                              stratify=data.y)
    tr, va = np.sort(tr), np.sort(va)
    for part in (tr, va):
        if np.unique(data.y[part]).size < 2:
            raise ValueError("split leaves a side with a single class")
    return data.subset(tr), data.subset(va)


@dataclass
class CVResult:
    method: str
    k_star: int | None
    gamma_star: float | None
    lambda_star: float | None
    table: list

    @property
    def best(self):
        return self.k_star if self.method == "sparse" else self.lambda_star


def _score_row(train, valid, w, b):
    scores = valid.X @ w + b
    pred = np.where(scores > 0, 1.0, -1.0)
    return {
        "auc": auc(scores, valid.y),
        "misclass": misclass_rate(pred, valid.y),
        "support_size": int(nonzero_mask(w).sum()),
    }


def _sparse_point(args):
    train, valid, k, gamma, opts = args
    fit = fit_sparse(train, k, FitOptions(**{**opts, "gamma": gamma}))
    row = {"k": k, "gamma": gamma, "certified": fit.certified,
           "cuts_used": fit.cuts_used}
    row.update(_score_row(train, valid, fit.w, fit.b))
    return row


def _lasso_point(args):
    train, valid, lam, kind = args
    fn = fit_lasso_logistic if kind is Loss.LOGISTIC else fit_lasso_svm
    try:
        fit = fn(train, lam)
        converged = True
    except LassoBudgetError as err:
        fit, converged = err.best, False
    row = {"lambda": lam, "converged": converged}
    row.update(_score_row(train, valid, fit.w, fit.b))
    return row


def _map(fn, jobs, workers):
    if workers <= 1:
        return [fn(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(fn, jobs))


def cross_validate(data, k_grid=None, gamma_grid=None, method="sparse",
                   kind=Loss.LOGISTIC, train_fraction=0.8, seed=0,
                   lambdas=None, lambda_count=20, fit_options=None, workers=1):
    """Pick hyperparameters by validation AUC on one stratified split.

    Parameters
    ----------
    data : Dataset
    k_grid : sequence of int
        Sparsity levels (sparse method).
    gamma_grid : sequence of float, optional
        Defaults to :func:`default_gamma_grid` of the training size.
    method : {"sparse", "lasso"}
    kind : Loss
        Logistic or hinge; the lasso baseline maps hinge to the L1-SVM.
    lambdas : sequence of float, optional
        Lasso grid; defaults to ``lambda_count`` points of :func:`lambda_grid`
        on the training part.
    fit_options : dict, optional
        Extra :class:`FitOptions` fields for the sparse fits.

    Returns
    -------
    CVResult
        Ties in AUC go to the smaller ``k`` and then the larger ``gamma``;
        for the lasso to the larger ``lambda``.
    """
    kind = as_loss(kind)
    train, valid = split_dataset(data, train_fraction, seed)
    if method == "sparse":
        if not k_grid:
            raise ValueError("k_grid must be nonempty")
        gammas = default_gamma_grid(train.n) if gamma_grid is None else gamma_grid
        opts = {"kind": kind, **(fit_options or {})}
        jobs = [(train, valid, int(k), float(g), opts)
                for k in k_grid for g in gammas]
        table = _map(_sparse_point, jobs, workers)
        best = max(table, key=lambda r: (r["auc"], -r["k"], r["gamma"]))
        return CVResult(method, best["k"], best["gamma"], None, table)
    if method == "lasso":
        if kind not in (Loss.LOGISTIC, Loss.HINGE):
            raise ValueError("the lasso baseline supports logistic and hinge")
        if lambdas is None:
            lambdas = lambda_grid(train, lambda_count,
                                  "logistic" if kind is Loss.LOGISTIC else "hinge")
        jobs = [(train, valid, float(lam), kind) for lam in lambdas]
        table = _map(_lasso_point, jobs, workers)
        best = max(table, key=lambda r: (r["auc"], r["lambda"]))
        return CVResult(method, None, None, best["lambda"], table)
    raise ValueError(f"method must be 'sparse' or 'lasso', got {method!r}")

