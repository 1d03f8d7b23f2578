"""L1-regularized logistic regression and L1-SVM baselines.

Both minimize ``sum_i loss(y_i, x_i'w + b) + lam * ||w||_1`` with the
intercept unpenalized. The smooth logistic problem is solved by monotone
FISTA with backtracking. The hinge is replaced by its Huber smoothing with
parameter ``mu``, driven down by continuation, and solved the same way.
"""
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .dataset import require_both_classes

SUPPORT_THRESHOLD = 1e-8
DEFAULT_MU_FINAL = 1e-4


class LassoBudgetError(RuntimeError):
    """Iteration budget exhausted; ``best`` holds the best iterate."""

    def __init__(self, message, best):
        super().__init__(message)
        self.best = best


@dataclass
class LassoFit:
    w: np.ndarray
    b: float
    lam: float
    objective: float = np.nan
    residual: float = np.nan
    iterations: int = 0
    mu: float | None = None
    path: list = field(default_factory=list)

    @property
    def support_size(self):
        return support_size(self.w)

    @property
    def support(self):
        return np.flatnonzero(nonzero_mask(self.w))


def nonzero_mask(w):
    """Entries above ``1e-8 * max|w|``; all False for ``w = 0``."""
    w = np.abs(np.asarray(w, dtype=float))
    top = w.max() if w.size else 0.0
    if top == 0:
        return np.zeros(w.shape, dtype=bool)
    return w > SUPPORT_THRESHOLD * top


def support_size(w):
    return int(nonzero_mask(w).sum())


def _soft(v, t):
    return np.sign(v) * np.maximum(np.abs(v) - t, 0.0)


class _Logistic:
    def value(self, y, u):
        return float(np.sum(np.logaddexp(0.0, -y * u)))

    def deriv(self, y, u):
        return -y * np.exp(-np.logaddexp(0.0, y * u))


class _Huber:
    """Smoothed hinge: quadratic on ``0 < 1 - yu < mu``, linear beyond."""

    def __init__(self, mu):
        self.mu = mu

    def value(self, y, u):
        z = 1.0 - y * u
        mu = self.mu
        return float(np.sum(np.where(z <= 0, 0.0,
                                     np.where(z < mu, z * z / (2 * mu), z - mu / 2))))

    def deriv(self, y, u):
        z = 1.0 - y * u
        return -y * np.clip(z / self.mu, 0.0, 1.0)


def _min_norm_subgrad(gw, gb, w, lam):
    """Largest entry of the minimum-norm subgradient of the composite objective."""
    r = np.where(w != 0, np.abs(gw + lam * np.sign(w)),
                 np.maximum(np.abs(gw) - lam, 0.0))
    return max(float(r.max(initial=0.0)), abs(gb))


def _mfista(X, y, loss, lam, w, b, tol, max_iter, trace=None):
    """Monotone FISTA (Beck and Teboulle) on ``(w, b)`` with backtracking.

    Returns ``(w, b, objective, residual, iterations, converged)``. The
    objective of the returned sequence never increases.
    """
    def smooth(w, b):
        u = X @ w + b
        return loss.value(y, u), loss.deriv(y, u)

    def full(w, b, f):
        return f + lam * np.abs(w).sum()

    f, d = smooth(w, b)
    F = full(w, b, f)
    gw, gb = X.T @ d, d.sum()
    step = 1.0 / max(1e-12, np.linalg.norm(X, 2) ** 2 * 0.25 + X.shape[0] * 0.25)
    if isinstance(loss, _Huber):
        step = 1.0 / max(1e-12, (np.linalg.norm(X, 2) ** 2 + X.shape[0]) / loss.mu)
    zw, zb = w.copy(), b
    theta = 1.0
    res = _min_norm_subgrad(gw, gb, w, lam)
    for it in range(1, max_iter + 1):
        if res <= tol:
            return w, b, F, res, it - 1, True
        # gradient at the extrapolated point
        _, dz = smooth(zw, zb)
        gzw, gzb = X.T @ dz, dz.sum()
        # let the step recover; the curvature bound is only local
        step *= 1.25
        while True:
            cw = _soft(zw - step * gzw, step * lam)
            cb = zb - step * gzb
            fc, dc = smooth(cw, cb)
            dw, db = cw - zw, cb - zb
            # for convex f this curvature test implies the descent lemma and,
            # unlike the function-value form, survives rounding near the optimum
            dd = dc - dz
            curv = (X.T @ dd) @ dw + dd.sum() * db
            if curv <= (dw @ dw + db * db) / (2 * step) or step < 1e-20:
                break
            step *= 0.5
        Fc = full(cw, cb, fc)
        theta_next = (1 + np.sqrt(1 + 4 * theta * theta)) / 2
        restart = dw @ (cw - w) + db * (cb - b) < 0
        if Fc <= F and not restart:
            zw = cw + ((theta - 1) / theta_next) * (cw - w)
            zb = cb + ((theta - 1) / theta_next) * (cb - b)
            w, b, F, d = cw, cb, Fc, dc
        elif Fc <= F:
            # momentum points uphill: accept the step, drop the momentum
            zw, zb = cw.copy(), cb
            w, b, F, d = cw, cb, Fc, dc
            theta_next = 1.0
        else:
            # monotone safeguard: keep the old point and restart momentum
            zw, zb = w.copy(), b
            theta_next = 1.0
        theta = theta_next
        if trace is not None:
            trace.append(F)
        gw, gb = X.T @ d, d.sum()
        res = _min_norm_subgrad(gw, gb, w, lam)
    return w, b, F, res, max_iter, res <= tol


def _intercept_only(y, loss):
    """Optimal intercept with ``w = 0``."""
    npos = np.count_nonzero(y > 0)
    if isinstance(loss, _Logistic):
        return float(np.log(npos / (y.size - npos)))

    def dF(b):
        return float(loss.deriv(y, np.full(y.size, b)).sum())

    return brentq(dF, -1.0 - 2 * loss.mu, 1.0 + 2 * loss.mu, xtol=1e-14)


def lambda_max(data, kind="logistic", mu=DEFAULT_MU_FINAL):
    """Smallest ``lam`` for which ``w = 0`` is optimal.

    Stationarity at ``w = 0`` with the intercept at its own optimum gives
    ``max_j |X_j' l'(y, b*)|``; for balanced classes and the logistic loss
    this is ``max_j |X_j' y| / 2``.
    """
    require_both_classes(data)
    loss = _Logistic() if kind == "logistic" else _Huber(mu)
    b = _intercept_only(data.y, loss)
    d = loss.deriv(data.y, np.full(data.n, b))
    return float(np.abs(data.X.T @ d).max())


def lambda_grid(data, count, kind="logistic"):
    """``count`` log-spaced values from ``lambda_max`` down to ``1e-4`` of it."""
    if count < 2:
        raise ValueError(f"count must be at least 2, got {count}")
    top = lambda_max(data, kind)
    return top * np.logspace(0.0, -4.0, count)


def _check(data, lam):
    if not lam >= 0:
        raise ValueError(f"lambda must be nonnegative, got {lam}")
    require_both_classes(data)


def fit_lasso_logistic(data, lam, tol=1e-6, max_iter=20000, w0=None, b0=None,
                       trace=None):
    """L1-regularized logistic regression.

    Parameters
    ----------
    data : Dataset
    lam : float
    tol : float
        Bound on the largest entry of the minimum-norm subgradient.
    w0, b0 : optional warm start.
    trace : list, optional
        Receives the objective after every iteration.

    Raises
    ------
    LassoBudgetError
        If ``max_iter`` iterations do not reach ``tol``.
    """
    _check(data, lam)
    loss = _Logistic()
    w = np.zeros(data.p) if w0 is None else np.array(w0, dtype=float)
    b = _intercept_only(data.y, loss) if b0 is None else float(b0)
    w, b, F, res, its, ok = _mfista(data.X, data.y, loss, lam, w, b, tol,
                                    max_iter, trace)
    fit = LassoFit(w=w, b=float(b), lam=float(lam), objective=F, residual=res,
                   iterations=its)
    if not ok:
        raise LassoBudgetError(
            f"lasso residual {res:.3g} > tol {tol:.3g} after {its} iterations", fit)
    return fit


def fit_lasso_svm(data, lam, tol=1e-4, mu_final=DEFAULT_MU_FINAL, max_iter=50000,
                  w0=None, b0=None, trace=None):
    """L1-SVM through Huber smoothing with continuation in ``mu``.

    ``mu`` runs through 1, 0.1, ... down to ``mu_final``; each stage is warm
    started from the previous one. The returned fit records ``mu`` and the
    exact hinge objective of the final iterate.
    """
    _check(data, lam)
    w = np.zeros(data.p) if w0 is None else np.array(w0, dtype=float)
    b = 0.0 if b0 is None else float(b0)
    mus = [1.0]
    while mus[-1] > mu_final * (1 + 1e-12):
        mus.append(max(mus[-1] / 10.0, mu_final))
    total = 0
    for i, mu in enumerate(mus):
        loss = _Huber(mu)
        if w0 is None and b0 is None and i == 0:
            b = _intercept_only(data.y, loss)
        # intermediate stages only need to land near the next one
        stage_tol = tol if i == len(mus) - 1 else max(tol, 1e-3)
        w, b, F, res, its, ok = _mfista(data.X, data.y, loss, lam, w, b,
                                        stage_tol, max_iter, trace)
        total += its
    u = data.X @ w + b
    hinge = float(np.maximum(0.0, 1.0 - data.y * u).sum()) + lam * np.abs(w).sum()
    fit = LassoFit(w=w, b=float(b), lam=float(lam), objective=hinge, residual=res,
                   iterations=total, mu=mus[-1])
    if not ok:
        raise LassoBudgetError(
            f"smoothed L1-SVM residual {res:.3g} > tol {tol:.3g}", fit)
    return fit


def lasso_path(data, lambdas, kind="logistic", tol=None, max_iter=None):
    """Fits along decreasing ``lambdas`` with warm starts.

    A stage that runs out of iterations contributes its best iterate; the
    returned fits carry their final residuals so callers can tell.
    """
    fit_fn = fit_lasso_logistic if kind == "logistic" else fit_lasso_svm
    opts = {}
    if tol is not None:
        opts["tol"] = tol
    if max_iter is not None:
        opts["max_iter"] = max_iter
    fits = []
    w, b = None, None
    for lam in sorted(lambdas, reverse=True):
        try:
            fit = fit_fn(data, lam, w0=w, b0=b, **opts)
        except LassoBudgetError as err:
            fit = err.best
        fits.append(fit)
        w, b = fit.w, fit.b
    for fit in fits:
        fit.path = [(f.lam, f.w, f.b) for f in fits]
    return fits
