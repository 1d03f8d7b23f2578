"""Classification losses and their Fenchel conjugates.

Every loss ``l(y, u)`` comes with its conjugate ``l*(y, a) = sup_u (u a - l(y, u))``
and the interval of ``a`` on which the conjugate is finite. The conjugate
domain is what turns into box constraints on the dual variables.

All functions broadcast over numpy arrays; scalar inputs give scalar outputs.
"""
from enum import Enum

import numpy as np
from scipy.special import xlogy


class Loss(str, Enum):
    LOGISTIC = "logistic"
    HINGE = "hinge"
    SQUARED_HINGE = "squared_hinge"


def as_loss(kind):
    """Coerce a string or :class:`Loss` to :class:`Loss`."""
    try:
        return Loss(kind)
    except ValueError:
        names = ", ".join(m.value for m in Loss)
        raise ValueError(f"unknown loss {kind!r}; expected one of {names}") from None


def _out(x):
    return x.item() if np.ndim(x) == 0 else x


def loss_value(kind, y, u):
    """Loss ``l(y, u)`` for labels ``y`` in {-1, +1} and margin scores ``u``."""
    kind = as_loss(kind)
    y = np.asarray(y, dtype=float)
    u = np.asarray(u, dtype=float)
    if not np.all(np.isfinite(u)):
        raise ValueError("margin scores must be finite")
    z = y * u
    if kind is Loss.LOGISTIC:
        val = np.logaddexp(0.0, -z)
    elif kind is Loss.HINGE:
        val = np.maximum(0.0, 1.0 - z)
    else:
        val = 0.5 * np.maximum(0.0, 1.0 - z) ** 2
    return _out(val)


def loss_derivative(kind, y, u):
    """Derivative of the loss in ``u`` (a subgradient for the hinge)."""
    kind = as_loss(kind)
    y = np.asarray(y, dtype=float)
    z = y * np.asarray(u, dtype=float)
    if kind is Loss.LOGISTIC:
        d = -y * np.exp(-np.logaddexp(0.0, z))
    elif kind is Loss.HINGE:
        d = np.where(z < 1.0, -y, 0.0)
    else:
        d = -y * np.maximum(0.0, 1.0 - z)
    return _out(d)


def conjugate_interval(kind, y):
    """Bounds ``(lower, upper)`` on ``alpha`` where the conjugate is finite.

    Logistic and hinge: ``y * alpha`` in [-1, 0]. Squared hinge:
    ``y * alpha <= 0``, so one side is infinite.
    """
    kind = as_loss(kind)
    y = np.asarray(y, dtype=float)
    pos = y > 0
    if kind is Loss.SQUARED_HINGE:
        lo = np.where(pos, -np.inf, 0.0)
        hi = np.where(pos, 0.0, np.inf)
    else:
        lo = np.where(pos, -1.0, 0.0)
        hi = np.where(pos, 0.0, 1.0)
    return _out(lo), _out(hi)


def conjugate_value(kind, y, alpha):
    """Fenchel conjugate ``l*(y, alpha)``; ``np.inf`` outside the domain.

    The logistic conjugate uses ``0 log 0 = 0`` so both interval endpoints
    evaluate to 0.
    """
    kind = as_loss(kind)
    y = np.asarray(y, dtype=float)
    t = y * np.asarray(alpha, dtype=float)
    if kind is Loss.SQUARED_HINGE:
        feasible = t <= 0.0
    else:
        feasible = (t >= -1.0) & (t <= 0.0)
    ts = np.where(feasible, t, -0.5)
    if kind is Loss.LOGISTIC:
        val = xlogy(1.0 + ts, 1.0 + ts) + xlogy(-ts, -ts)
    elif kind is Loss.HINGE:
        val = ts
    else:
        val = 0.5 * ts * ts + ts
    return _out(np.where(feasible, val, np.inf))


def conjugate_derivative(kind, y, alpha):
    """First derivative of the conjugate in ``alpha`` (inside its domain).

    The logistic derivative diverges at both endpoints; callers keep the
    iterates strictly interior for that loss.
    """
    kind = as_loss(kind)
    y = np.asarray(y, dtype=float)
    a = np.asarray(alpha, dtype=float)
    t = y * a
    if kind is Loss.LOGISTIC:
        with np.errstate(divide="ignore"):
            d = y * (np.log1p(t) - np.log(-t))
    elif kind is Loss.HINGE:
        d = y * np.ones_like(t)
    else:
        d = a + y
    return _out(d)


def conjugate_curvature(kind, y, alpha):
    """Second derivative of the conjugate in ``alpha``."""
    kind = as_loss(kind)
    t = np.asarray(y, dtype=float) * np.asarray(alpha, dtype=float)
    if kind is Loss.LOGISTIC:
        with np.errstate(divide="ignore"):
            h = 1.0 / (-t * (1.0 + t))
    elif kind is Loss.HINGE:
        h = np.zeros_like(t)
    else:
        h = np.ones_like(t)
    return _out(h)
