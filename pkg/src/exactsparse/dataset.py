"""The ``Dataset`` container and the input checks shared by every solver."""
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np


@dataclass(frozen=True)
class Dataset:
    """Design matrix ``X`` (n x p) with labels ``y`` in {-1, +1}."""

    X: np.ndarray
    y: np.ndarray
    names: Optional[Sequence[str]] = field(default=None, compare=False)

    def __post_init__(self):
        X = np.asarray(self.X, dtype=float)
        y = np.asarray(self.y, dtype=float).ravel()
        if X.ndim != 2:
            raise ValueError(f"X must be 2-dimensional, got shape {X.shape}")
        n, p = X.shape
        if n < 2 or p < 1:
            raise ValueError(f"need n >= 2 and p >= 1, got n={n}, p={p}")
        if y.shape[0] != n:
            raise ValueError(f"X has {n} rows but y has {y.shape[0]} labels")
        if not np.all(np.isfinite(X)):
            raise ValueError("X contains non-finite entries")
        if not np.all(np.isin(y, (-1.0, 1.0))):
            raise ValueError("labels must be -1 or +1")
        if self.names is not None and len(self.names) != p:
            raise ValueError(f"{len(self.names)} column names for {p} columns")
        X.setflags(write=False)
        y.setflags(write=False)
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "y", y)

    @property
    def n(self):
        return self.X.shape[0]

    @property
    def p(self):
        return self.X.shape[1]

    @property
    def has_both_classes(self):
        return bool(np.any(self.y > 0) and np.any(self.y < 0))

    def subset(self, rows):
        return Dataset(self.X[rows], self.y[rows], self.names)

    def feature_names(self):
        if self.names is not None:
            return list(self.names)
        return [f"x{j}" for j in range(self.p)]


def require_both_classes(data):
    if not data.has_both_classes:
        raise ValueError("both classes must be present in the labels")


def as_mask(s, p):
    """Validate a support vector of length ``p`` with entries in [0, 1]."""
    s = np.asarray(s, dtype=float).ravel()
    if s.shape[0] != p:
        raise ValueError(f"support has length {s.shape[0]}, expected {p}")
    if np.any(s < 0) or np.any(s > 1) or not np.all(np.isfinite(s)):
        raise ValueError("support entries must lie in [0, 1]")
    return s


def mask_from_indices(indices, p):
    s = np.zeros(p)
    s[list(indices)] = 1.0
    return s


def standardize_columns(X):
    """Center columns and scale to unit (population) variance.

    Constant columns are centered and left at zero.
    """
    X = np.asarray(X, dtype=float)
    Z = X - X.mean(axis=0)
    sd = np.sqrt((Z * Z).mean(axis=0))
    sd[sd == 0] = 1.0
    return Z / sd
