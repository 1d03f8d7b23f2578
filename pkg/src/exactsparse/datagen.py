"""Synthetic instances with a planted sparse classifier.

Features are Gaussian with AR(1) covariance ``rho^|i-j|``. The planted
weights have ``k_true`` nonzeros, either random signs or all ones. Labels
follow a logistic model or the sign of a noisy linear score.
"""
import math
import warnings
from dataclasses import dataclass

import numpy as np

from .dataset import Dataset, standardize_columns

LABEL_MODELS = ("logistic", "sign")
TRUTH_MODELS = ("pm1", "binary")


@dataclass(frozen=True)
class SyntheticConfig:
    n: int
    p: int
    k_true: int
    rho: float = 0.0
    snr: float = math.inf
    label_model: str = "logistic"
    truth_model: str = "pm1"
    sigma2: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.n < 2 or self.p < 1:
            raise ValueError("need n >= 2 and p >= 1")
        if not 0 <= self.k_true <= self.p:
            raise ValueError(f"k_true must lie in [0, p], got {self.k_true}")
        if not 0.0 <= self.rho < 1.0:
            raise ValueError(f"rho must lie in [0, 1), got {self.rho}")
        if not self.snr > 0:
            raise ValueError(f"snr must be positive, got {self.snr}")
        if self.sigma2 < 0:
            raise ValueError(f"sigma2 must be nonnegative, got {self.sigma2}")
        if self.label_model not in LABEL_MODELS:
            raise ValueError(f"label_model must be one of {LABEL_MODELS}")
        if self.truth_model not in TRUTH_MODELS:
            raise ValueError(f"truth_model must be one of {TRUTH_MODELS}")


@dataclass
class SyntheticInstance:
    data: Dataset
    w_true: np.ndarray
    epsilon: np.ndarray
    achieved_snr: float
    config: SyntheticConfig
    single_class: bool = False

    @property
    def support(self):
        return np.flatnonzero(self.w_true)


def sign(v):
    """Elementwise sign with ``sign(0) = -1``."""
    return np.where(np.asarray(v) > 0, 1.0, -1.0)


def _rng(seed):
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def gen_features(n, p, rho, seed=None, standardize=True):
    """Rows i.i.d. N(0, Sigma) with ``Sigma_ij = rho^|i-j|``.

    Built column by column, ``x_j = rho x_{j-1} + sqrt(1 - rho^2) z_j``, and
    standardized to empirical mean 0 and variance 1 unless told otherwise.
    """
    if not 0.0 <= rho < 1.0:
        raise ValueError(f"rho must lie in [0, 1), got {rho}")
    Z = _rng(seed).standard_normal((n, p))
    X = np.empty_like(Z)
    X[:, 0] = Z[:, 0]
    scale = math.sqrt(1.0 - rho * rho)
    for j in range(1, p):
        X[:, j] = rho * X[:, j - 1] + scale * Z[:, j]
    return standardize_columns(X) if standardize else X


def gen_truth(p, k_true, truth_model="pm1", seed=None):
    """Weight vector with exactly ``k_true`` nonzeros at random positions."""
    if not 0 <= k_true <= p:
        raise ValueError(f"k_true must lie in [0, p], got {k_true}")
    if truth_model not in TRUTH_MODELS:
        raise ValueError(f"truth_model must be one of {TRUTH_MODELS}")
    rng = _rng(seed)
    w = np.zeros(p)
    pos = rng.choice(p, size=k_true, replace=False)
    if truth_model == "binary":
        w[pos] = 1.0
    else:
        w[pos] = rng.choice([-1.0, 1.0], size=k_true)
    return w


def gen_labels(X, w_true, config, seed=None):
    """Labels and noise for a planted ``w_true``.

    Returns
    -------
    y : ndarray of +-1
    epsilon : ndarray
        Noise added to the score. Outside the binary-truth model it is
        rescaled so that ``||X w|| / ||epsilon|| = sqrt(snr)`` exactly.
    """
    rng = _rng(seed)
    X = np.asarray(X, dtype=float)
    score = X @ np.asarray(w_true, dtype=float)
    n = score.size
    if config.truth_model == "binary":
        eps = math.sqrt(config.sigma2) * rng.standard_normal(n)
    elif math.isinf(config.snr):
        eps = np.zeros(n)
    else:
        eps = rng.standard_normal(n)
        signal = np.linalg.norm(score)
        eps *= signal / (math.sqrt(config.snr) * np.linalg.norm(eps))
    z = score + eps
    if config.label_model == "logistic":
        prob = np.exp(-np.logaddexp(0.0, -z))
        y = np.where(rng.random(n) < prob, 1.0, -1.0)
    else:
        y = sign(z)
    return y, eps


def make_instance(config):
    """Draw a full instance; each component uses its own child seed."""
    feat, truth, noise = np.random.SeedSequence(config.seed).spawn(3)
    X = gen_features(config.n, config.p, config.rho, np.random.default_rng(feat),
                     standardize=config.truth_model != "binary")
    w = gen_truth(config.p, config.k_true, config.truth_model,
                  np.random.default_rng(truth))
    y, eps = gen_labels(X, w, config, np.random.default_rng(noise))
    enorm = np.linalg.norm(eps)
    achieved = math.inf if enorm == 0 else (np.linalg.norm(X @ w) / enorm) ** 2
    single = bool(np.all(y == y[0]))
    if single:
        warnings.warn("generated labels contain a single class", RuntimeWarning,
                      stacklevel=2)
    return SyntheticInstance(Dataset(X, y), w, eps, achieved, config, single)


def make_validation(instance, n_val):
    """Fresh sample of size ``n_val`` from the same planted model.

    Features and noise use a seed stream disjoint from the training draw;
    ``w_true`` is shared.
    """
    config = instance.config
    feat, noise = np.random.SeedSequence([config.seed, 1]).spawn(2)
    X = gen_features(n_val, config.p, config.rho, np.random.default_rng(feat),
                     standardize=config.truth_model != "binary")
    y, _ = gen_labels(X, instance.w_true, config, np.random.default_rng(noise))
    return Dataset(X, y)
