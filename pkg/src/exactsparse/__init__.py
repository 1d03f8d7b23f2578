"""Exact sparse classification by outer approximation.

The main entry points are :func:`fit_sparse` and the scikit-learn style
:class:`SparseClassifier`; lasso baselines, synthetic data, metrics and
closed-form recovery theory live in their own modules.
"""
from .dataset import Dataset
from .dual import evaluate_support
from .estimators import LassoClassifier, SparseClassifier
from .lasso import fit_lasso_logistic, fit_lasso_svm, lambda_grid
from .losses import Loss
from .master import CutPool, solve_master
from .oa import FitOptions, FitResult, fit_sparse

__all__ = [
    "Dataset", "Loss", "evaluate_support", "CutPool", "solve_master", "FitOptions",
    "FitResult", "fit_sparse", "fit_lasso_logistic", "fit_lasso_svm", "lambda_grid",
    "SparseClassifier", "LassoClassifier",
]
