"""Inner dual problem for a fixed support.

For a support vector ``s`` in [0, 1]^p the regularized classification
problem restricted to the selected columns has the dual

    c(s) = max_a  -sum_i l*(y_i, a_i) - gamma/2 * sum_j s_j (X_j' a)^2
           s.t.   sum_i a_i = 0,  a_i in dom l*(y_i, .)

``c`` is convex in ``s`` (pointwise max of functions linear in ``s``) and
its gradient at ``s`` is ``-gamma/2 * (X_j' a*)^2``. Evaluating the dual at
any feasible ``a`` gives an affine function of ``s`` that lower-bounds ``c``
everywhere, which is the cut handed to the master problem.
"""
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .dataset import as_mask, require_both_classes
from .losses import (
    Loss,
    as_loss,
    conjugate_derivative,
    conjugate_interval,
    conjugate_value,
    loss_derivative,
    loss_value,
)

DEFAULT_TOL = 1e-8
DEFAULT_MAX_ITER = 100_000

# Near y*alpha = -1 the logistic conjugate needs 1 + y*alpha, which cannot be
# resolved below this distance; the box is closed off there. That end
# corresponds to margins below about -34.
_LOGISTIC_EDGE = 1e-15
# At y*alpha = 0 the conjugate's derivative is infinite. Keeping the smallest
# subnormal away only excludes margins above about 744.
_LOGISTIC_TINY = np.finfo(float).smallest_subnormal


class InfeasibleProjectionError(ValueError):
    pass


class DualBudgetError(RuntimeError):
    """The inner solver hit its iteration cap.

    ``best`` holds the solution built from the last feasible iterate; its
    cut is still a valid minorant, only less tight.
    """

    def __init__(self, message, best):
        super().__init__(message)
        self.best = best


@dataclass
class DualSolution:
    alpha: np.ndarray
    objective: float
    grad: np.ndarray
    w: np.ndarray
    b: float
    gap: float
    iterations: int = 0


@dataclass(frozen=True)
class Cut:
    """Affine minorant ``intercept + coeffs' s`` of ``c`` on [0, 1]^p."""

    intercept: float
    coeffs: np.ndarray
    origin: np.ndarray

    def __call__(self, s):
        return float(self.intercept + self.coeffs @ np.asarray(s, dtype=float))


def project_box_hyperplane(v, lower, upper):
    """Euclidean projection of ``v`` onto ``{a : sum(a) = 0, lower <= a <= upper}``.

    The multiplier ``nu`` of the hyperplane solves the monotone piecewise
    linear equation ``sum(clip(v - nu, lower, upper)) = 0``; it is bracketed
    by bisection over the sorted breakpoints and then found exactly by
    linear interpolation inside the bracket.
    """
    v = np.asarray(v, dtype=float)
    lo = np.broadcast_to(np.asarray(lower, dtype=float), v.shape)
    hi = np.broadcast_to(np.asarray(upper, dtype=float), v.shape)
    if np.any(lo > hi):
        raise InfeasibleProjectionError("box with lower > upper")
    if lo.sum() > 0.0 or hi.sum() < 0.0:
        raise InfeasibleProjectionError(
            "box does not meet the hyperplane sum(a) = 0"
        )

    def phi(nu):
        return np.clip(v - nu, lo, hi).sum()

    bps = np.concatenate([v - hi, v - lo])
    bps = np.unique(bps[np.isfinite(bps)])
    if bps.size == 0:
        nu = v.mean()
    else:
        f_first = phi(bps[0])
        f_last = phi(bps[-1])
        # a zero slope past the breakpoints means the sign is rounding noise
        if f_first < 0.0:
            slope = np.count_nonzero(np.isinf(hi))
            nu = bps[0] + f_first / slope if slope else bps[0]
        elif f_last > 0.0:
            slope = np.count_nonzero(np.isinf(lo))
            nu = bps[-1] + f_last / slope if slope else bps[-1]
        else:
            i, j = 0, bps.size - 1
            fi, fj = f_first, f_last
            while j - i > 1:
                mid = (i + j) // 2
                fm = phi(bps[mid])
                if fm >= 0.0:
                    i, fi = mid, fm
                else:
                    j, fj = mid, fm
            if fi == fj:
                nu = bps[i]
            else:
                nu = bps[i] + fi * (bps[j] - bps[i]) / (fi - fj)
    x = np.clip(v - nu, lo, hi)
    r = x.sum()
    if r != 0.0:
        free = (x > lo) & (x < hi)
        if np.any(free):
            x[free] -= r / np.count_nonzero(free)
            x = np.clip(x, lo, hi)
    return x


class _InnerProblem:
    """Dual objective pieces for one (dataset, support, gamma, loss)."""

    def __init__(self, data, s, gamma, kind):
        self.kind = kind
        self.gamma = gamma
        self.y = data.y
        active = np.flatnonzero(s > 0)
        self.U = data.X[:, active] * np.sqrt(s[active])
        lo, hi = conjugate_interval(kind, data.y)
        if kind is Loss.LOGISTIC:
            lo = np.where(data.y > 0, -1.0 + _LOGISTIC_EDGE, _LOGISTIC_TINY)
            hi = np.where(data.y > 0, -_LOGISTIC_TINY, 1.0 - _LOGISTIC_EDGE)
        self.lo, self.hi = lo, hi

    @property
    def quadratic(self):
        return self.kind is not Loss.LOGISTIC

    def value(self, alpha):
        v = self.U.T @ alpha
        return -np.sum(conjugate_value(self.kind, self.y, alpha)) - 0.5 * self.gamma * (v @ v)

    def grad(self, alpha):
        return (-conjugate_derivative(self.kind, self.y, alpha)
                - self.gamma * (self.U @ (self.U.T @ alpha)))

    def curvature_along(self, d):
        """``-d' H d`` for the quadratic losses (H the dual Hessian)."""
        Ud = self.U.T @ d
        c = self.gamma * (Ud @ Ud)
        if self.kind is Loss.SQUARED_HINGE:
            c += d @ d
        return c

    def project(self, v):
        return project_box_hyperplane(v, self.lo, self.hi)

    def residual(self, alpha, g):
        step = self.project(alpha + g) - alpha
        return float(np.linalg.norm(step) + abs(alpha.sum()))

    def attainable(self, alpha, tol):
        """``tol`` raised to the rounding level of the gradient at ``alpha``.

        The quadratic term is measured before cancellation, since that is
        what bounds the error of ``U @ (U.T @ alpha)``.
        """
        A = np.abs(self.U)
        quad = self.gamma * (A @ (A.T @ np.abs(alpha)))
        conj = conjugate_derivative(self.kind, self.y, alpha)
        scale = 1.0 + np.linalg.norm(quad) + np.linalg.norm(conj[np.isfinite(conj)])
        return max(tol, 4.0 * np.finfo(float).eps * scale)

    def start(self):
        """Strictly interior feasible point: class-balanced constant duals."""
        y = self.y
        n = y.size
        npos = np.count_nonzero(y > 0)
        return np.where(y > 0, -(n - npos) / n, npos / n)


def _diag_lowrank_solver(D, U, gamma):
    """Return a solver for ``(diag(D) + gamma U U') X = B``.

    Woodbury costs O(n m^2) for ``m`` columns. ``D`` can span many decades
    near the box boundary, so two rounds of iterative refinement follow.
    """
    m = U.shape[1]
    dinv = 1.0 / D
    if m:
        DU = dinv[:, None] * U
        C = np.linalg.cholesky(np.eye(m) / gamma + U.T @ DU)

    def woodbury(B):
        z = dinv[:, None] * B
        if m:
            z -= DU @ np.linalg.solve(C.T, np.linalg.solve(C, U.T @ z))
        return z

    def solve(B):
        z = woodbury(B)
        for _ in range(2):
            z += woodbury(B - D[:, None] * z - gamma * (U @ (U.T @ z)))
        return z

    return solve


def _logistic_primal_newton(prob, alpha, tol, max_iter):
    """Damped Newton on the logistic primal in ``(v, b)``, ``v = -gamma U'alpha``.

    The primal has only ``m + 1`` unknowns and is strongly convex, so Newton
    converges from any start. The dual point ``alpha_i = l'(y_i, u_i)`` lies
    strictly inside the box, and at a primal stationary point the dual
    gradient is the constant ``-b``, which the hyperplane projection removes.
    """
    U, gamma, y = prob.U, prob.gamma, prob.y
    m = U.shape[1]
    A = np.column_stack([U, np.ones(y.size)])
    reg = np.append(np.full(m, 1.0 / gamma), 0.0)
    theta = np.zeros(m + 1)
    if alpha is not None:
        theta[:m] = -gamma * (U.T @ alpha)

    def objective(th):
        return (np.sum(np.logaddexp(0.0, -y * (A @ th)))
                + 0.5 * np.sum(reg * th * th))

    def dual_point(th):
        # sum(a) is zero up to rounding; spread the correction in the local
        # metric so tiny entries keep their relative accuracy
        sig = np.exp(-np.logaddexp(0.0, y * (A @ th)))
        a = -y * sig
        wt = sig * (1.0 - sig)
        if wt.sum() > 0:
            a -= a.sum() * wt / wt.sum()
        return np.clip(a, prob.lo, prob.hi)

    f = objective(theta)
    best, best_res, best_it = None, np.inf, 0
    for it in range(max_iter):
        a = dual_point(theta)
        res = prob.residual(a, prob.grad(a))
        if res < best_res:
            best, best_res, best_it = a, res, it
        if res <= tol:
            return a, res, it
        margin = y * (A @ theta)
        sig = np.exp(-np.logaddexp(0.0, margin))  # sigmoid(-margin)
        grad = A.T @ (-y * sig) + reg * theta
        H = (A * (sig * (1.0 - sig))[:, None]).T @ A + np.diag(reg)
        # the intercept block can be flat on separable data
        H[m, m] += 1e-12 * (1.0 + H[m, m])
        step = -np.linalg.solve(H, grad)
        slope = grad @ step
        # Newton decrement at rounding level: nothing left to gain
        if -slope <= 1e-24 * (1.0 + abs(f)) and it - best_it > 3:
            break
        t = 1.0
        # below the rounding level of f the Armijo test is noise; Newton is
        # in its quadratic phase there and the full step is taken
        if -slope > 1e-12 * (1.0 + abs(f)):
            while t > 1e-12:
                ft = objective(theta + t * step)
                if ft <= f + 1e-4 * t * slope:
                    break
                t *= 0.5
        theta = theta + t * step
        f = objective(theta)
    return best, best_res, it + 1


def _interior_point_qp(prob, alpha, tol, max_iter):
    """Mehrotra predictor-corrector for the hinge and squared hinge duals.

    Solves ``min 1/2 a'Qa + y'a`` over the box and ``sum(a) = 0`` with
    ``Q = gamma U U'`` (plus the identity for the squared hinge). Slacks to
    the box are separate iterates, so ``a`` may approach a bound closer than
    its own rounding error. Each Newton system is diagonal plus rank ``m``.
    """
    U, gamma = prob.U, prob.gamma
    lo, hi = prob.lo, prob.hi
    has_lo, has_hi = np.isfinite(lo), np.isfinite(hi)
    lo0, hi0 = np.where(has_lo, lo, 0.0), np.where(has_hi, hi, 0.0)
    extra = 1.0 if prob.kind is Loss.SQUARED_HINGE else 0.0
    ncon = max(np.count_nonzero(has_lo) + np.count_nonzero(has_hi), 1)
    fl, fu = has_lo.astype(float), has_hi.astype(float)
    sl = np.where(has_lo, alpha - lo0, 1.0)
    su = np.where(has_hi, hi0 - alpha, 1.0)
    # multipliers that balance the starting gradient, so the dual residual
    # does not lag behind the complementarity gap
    dF = -prob.grad(alpha)
    zl = fl * (np.maximum(dF, 0.0) + 1.0)
    zu = fu * (np.maximum(-dF, 0.0) + 1.0)
    nu = 0.0

    def max_step(x, dx):
        with np.errstate(divide="ignore", invalid="ignore"):
            t = np.where(dx < 0, -x / dx, np.inf)
        return min(1.0, t.min())

    best, best_res, best_it = prob.project(alpha), np.inf, 0
    at_lo = at_hi = np.zeros(alpha.size, dtype=bool)
    for it in range(max_iter):
        feasible = prob.project(alpha)
        g = prob.grad(feasible)
        res = prob.residual(feasible, g)
        if res < best_res:
            best, best_res, best_it = feasible, res, it
            at_lo, at_hi = has_lo & (zl > sl), has_hi & (zu > su)
        if res <= tol:
            return feasible, res, it
        mu = (np.sum(sl * zl * fl) + np.sum(su * zu * fu)) / ncon
        # late iterations lose accuracy as the barrier terms spread over
        # many orders of magnitude; finish with an exact active-set solve
        if mu < 1e-20 or (mu < 1e-9 and it - best_it > 3):
            break
        # minimization form; the gradient of 1/2 a'Qa + y'a is -grad(a)
        rd = -prob.grad(alpha) + nu - zl * fl + zu * fu
        rp = alpha.sum()
        D = fl * zl / sl + fu * zu / su + extra
        lowrank = _diag_lowrank_solver(D, U, gamma)

        def solve(target_l, target_u):
            rhs = (-rd + fl * (target_l - sl * zl) / sl
                   - fu * (target_u - su * zu) / su)
            z = lowrank(np.column_stack([rhs, np.ones_like(rhs)]))
            dnu = (z[:, 0].sum() + rp) / z[:, 1].sum()
            da = z[:, 0] - dnu * z[:, 1]
            # slacks move with alpha exactly; their drift from alpha is
            # rounding noise and is not fed back
            dsl = fl * da
            dsu = -fu * da
            dzl = fl * (target_l - sl * zl - zl * dsl) / sl
            dzu = fu * (target_u - su * zu - zu * dsu) / su
            return da, dnu, dsl, dsu, dzl, dzu

        da, dnu, dsl, dsu, dzl, dzu = solve(0.0, 0.0)
        t_aff = min(max_step(sl, dsl), max_step(su, dsu),
                    max_step(zl, dzl), max_step(zu, dzu))
        mu_aff = (np.sum((sl + t_aff * dsl) * (zl + t_aff * dzl) * fl)
                  + np.sum((su + t_aff * dsu) * (zu + t_aff * dzu) * fu)) / ncon
        sigma = (mu_aff / mu) ** 3
        da, dnu, dsl, dsu, dzl, dzu = solve(sigma * mu - dsl * dzl,
                                            sigma * mu - dsu * dzu)
        t = 0.99 * min(max_step(sl, dsl), max_step(su, dsu),
                       max_step(zl, dzl), max_step(zu, dzu))
        t = min(t, 1.0)
        alpha = alpha + t * da
        nu += t * dnu
        sl = np.where(has_lo, sl + t * dsl, 1.0)
        su = np.where(has_hi, su + t * dsu, 1.0)
        zl = zl + t * dzl
        zu = zu + t * dzu
    polished = _crossover(prob, best, at_lo, at_hi)
    if polished is not None:
        res = prob.residual(polished, prob.grad(polished))
        if res < best_res:
            best, best_res = polished, res
    return best, best_res, it + 1


def _crossover(prob, alpha, at_lo, at_hi, rounds=10):
    """Polish a dual QP solution by solving for a guessed active set.

    Coordinates flagged ``at_lo``/``at_hi`` are held at their bounds and the
    rest solve the equality-constrained KKT system, moving as little as
    possible from ``alpha``. The guess is corrected
    for a few rounds: free coordinates leaving the box are clamped and fixed
    ones with wrong-sign multipliers are released. Returns the best point
    found, or None when the free block is too large to factor.
    """
    U, gamma, y = prob.U, prob.gamma, prob.y
    lo, hi = prob.lo, prob.hi
    extra = 1.0 if prob.kind is Loss.SQUARED_HINGE else 0.0
    at_lo, at_hi = at_lo.copy(), at_hi.copy()
    best, best_res = None, np.inf
    for _ in range(rounds):
        free = ~(at_lo | at_hi)
        nf = int(free.sum())
        if nf > 2000:
            return best
        a = alpha.copy()
        a[at_lo] = lo[at_lo]
        a[at_hi] = hi[at_hi]
        fixed = ~free
        K = np.zeros((nf + 1, nf + 1))
        K[:nf, :nf] = gamma * U[free] @ U[free].T + extra * np.eye(nf)
        K[:nf, nf] = K[nf, :nf] = 1.0
        rhs = np.empty(nf + 1)
        rhs[:nf] = -y[free] - gamma * U[free] @ (U[fixed].T @ a[fixed])
        rhs[nf] = -a[fixed].sum()
        # the dual optimum may be a whole face; take the solution nearest
        # to the current point rather than the minimum-norm one
        x0 = np.append(a[free], 0.0)
        x0 += np.linalg.lstsq(K, rhs - K @ x0, rcond=None)[0]
        a[free] = x0[:nf]
        nu = x0[nf]
        cand = prob.project(a)
        res = prob.residual(cand, prob.grad(cand))
        if res < best_res:
            best, best_res = cand, res
        # bound multipliers of the fixed block, in the minimization form
        lam = -prob.grad(a) + nu
        below, above = free & (a < lo), free & (a > hi)
        wrong_lo, wrong_hi = at_lo & (lam < 0), at_hi & (lam > 0)
        if not (below.any() or above.any() or wrong_lo.any() or wrong_hi.any()):
            break
        at_lo |= below
        at_hi |= above
        at_lo &= ~wrong_lo
        at_hi &= ~wrong_hi
    return best


def _spg(prob, alpha, tol, max_iter, memory=10):
    """Spectral projected gradient ascent with a nonmonotone Armijo search.

    For the quadratic duals (hinge, squared hinge) the exact maximizer along
    the search direction is used, which satisfies the Armijo condition.
    """
    alpha = prob.project(alpha)
    g = prob.grad(alpha)
    f = prob.value(alpha)
    recent = [f]
    sigma = 1.0 / max(1.0, np.abs(g).max())
    for it in range(max_iter):
        res = prob.residual(alpha, g)
        if res <= tol:
            return alpha, res, it
        d = prob.project(alpha + sigma * g) - alpha
        gd = g @ d
        if gd <= 0.0:
            sigma = 1.0
            d = prob.project(alpha + g) - alpha
            gd = g @ d
            if gd <= 0.0:
                break
        if prob.quadratic:
            curv = prob.curvature_along(d)
            beta = 1.0 if curv <= gd else gd / curv
            new = alpha + beta * d
            fn = f + beta * gd - 0.5 * beta * beta * curv
        else:
            ref = min(recent)
            beta = 1.0
            while True:
                new = alpha + beta * d
                fn = prob.value(new)
                if fn >= ref + 1e-4 * beta * gd or beta < 1e-16:
                    break
                beta *= 0.5
        gn = prob.grad(new)
        step = new - alpha
        sy = -(step @ (gn - g))
        sigma = (step @ step) / sy if sy > 0 else 1e10
        sigma = min(max(sigma, 1e-10), 1e10)
        alpha, g, f = new, gn, fn
        recent.append(f)
        if len(recent) > memory:
            recent.pop(0)
    return alpha, prob.residual(alpha, g), max_iter


def _pairwise_hinge(prob, alpha, tol, max_iter):
    """Two-coordinate ascent on the maximal violating pair.

    Every update moves ``a_i`` up and ``a_j`` down by the same amount, so
    ``sum(a) = 0`` holds exactly along the way.
    """
    alpha = prob.project(alpha)
    U, gamma, lo, hi = prob.U, prob.gamma, prob.lo, prob.hi
    g = prob.grad(alpha)
    for it in range(max_iter):
        up = alpha < hi
        down = alpha > lo
        if not up.any() or not down.any():
            break
        i = np.flatnonzero(up)[np.argmax(g[up])]
        j = np.flatnonzero(down)[np.argmin(g[down])]
        viol = g[i] - g[j]
        if viol <= tol:
            break
        diff = U[i] - U[j]
        curv = gamma * (diff @ diff)
        delta = viol / curv if curv > 0 else np.inf
        delta = min(delta, hi[i] - alpha[i], alpha[j] - lo[j])
        alpha[i] += delta
        alpha[j] -= delta
        g -= gamma * delta * (U @ diff)
    g = prob.grad(alpha)
    return alpha, prob.residual(alpha, g), it


def dual_objective(data, s, alpha, gamma, kind):
    """``f(alpha, s)``: the dual objective, linear in ``s``."""
    kind = as_loss(kind)
    s = as_mask(s, data.p)
    v = data.X.T @ np.asarray(alpha, dtype=float)
    return float(-np.sum(conjugate_value(kind, data.y, alpha)) - 0.5 * gamma * np.sum(s * v * v))


def primal_objective(data, w, b, gamma, kind):
    """``sum_i l(y_i, x_i'w + b) + ||w||^2 / (2 gamma)``."""
    u = data.X @ w + b
    return float(np.sum(loss_value(kind, data.y, u)) + (w @ w) / (2.0 * gamma))


def _hinge_intercept(y, u):
    # objective in b is sum_pos max(0, c_i - b) + sum_neg max(0, b - c_i), c_i = y_i - u_i
    c = y - u
    pos = np.sort(c[y > 0])
    neg = np.sort(c[y < 0])
    cand = np.unique(c)
    d_left = -(pos.size - np.searchsorted(pos, cand, "left")) + np.searchsorted(neg, cand, "left")
    d_right = -(pos.size - np.searchsorted(pos, cand, "right")) + np.searchsorted(neg, cand, "right")
    best = cand[(d_left <= 0) & (d_right >= 0)]
    return 0.5 * (best.min() + best.max())


def _smooth_intercept(kind, y, u, xtol=1e-12):
    def slope(b):
        return np.sum(loss_derivative(kind, y, u + b))

    lo, hi = -1.0, 1.0
    while slope(lo) > 0:
        lo *= 2.0
    while slope(hi) < 0:
        hi *= 2.0
    if slope(lo) == 0:
        return lo
    if slope(hi) == 0:
        return hi
    return brentq(slope, lo, hi, xtol=xtol, rtol=4 * np.finfo(float).eps)


def best_intercept(data, w, kind):
    """Exact minimizer over ``b`` of the loss given fixed weights ``w``."""
    kind = as_loss(kind)
    require_both_classes(data)
    u = data.X @ w
    if kind is Loss.HINGE:
        return float(_hinge_intercept(data.y, u))
    return float(_smooth_intercept(kind, data.y, u))


def recover_primal(data, s, alpha, gamma, kind):
    """Primal classifier from dual variables: ``w_s = -gamma X_s' alpha``.

    Coordinates outside the support are zero; for fractional ``s`` the
    weights are additionally scaled by ``s_j``. The intercept minimizes the
    primal loss in ``b`` with ``w`` fixed.
    """
    s = as_mask(s, data.p)
    alpha = np.asarray(alpha, dtype=float)
    active = np.flatnonzero(s > 0)
    w = np.zeros(data.p)
    w[active] = -gamma * s[active] * (data.X[:, active].T @ alpha)
    b = best_intercept(data, w, kind)
    return w, b


def _solution(data, s, alpha, gamma, kind, gap, iterations):
    corr = data.X.T @ alpha
    grad = -0.5 * gamma * corr * corr
    w, b = recover_primal(data, s, alpha, gamma, kind)
    obj = dual_objective(data, s, alpha, gamma, kind)
    return DualSolution(alpha=alpha, objective=obj, grad=grad, w=w, b=b,
                        gap=gap, iterations=iterations)


def evaluate_support(data, s, gamma, kind=Loss.LOGISTIC, tol=DEFAULT_TOL,
                     max_iter=DEFAULT_MAX_ITER, method="auto", alpha0=None):
    """Solve the inner dual at support ``s`` and return a :class:`DualSolution`.

    Parameters
    ----------
    data : Dataset
    s : array of shape (p,)
        Support mask. Fractional entries in [0, 1] are accepted.
    gamma : float
        Ridge parameter, the primal penalty is ``||w||^2 / (2 gamma)``.
    kind : Loss or str
    tol : float
        Bound on the certified residual: the norm of the projected gradient
        step plus the violation of ``sum(alpha) = 0``.
    method : {"auto", "newton", "spg", "pairwise"}
        ``auto`` and ``newton`` run damped Newton on the small logistic
        primal and map it to the dual, or a primal-dual interior-point
        method with an active-set polish for the hinge losses. ``spg`` is
        spectral projected gradient ascent and ``pairwise`` two-coordinate
        ascent for the hinge loss; both serve as cross-checks.
    alpha0 : array, optional
        Warm start; projected onto the feasible set first.

    Raises
    ------
    DualBudgetError
        If ``max_iter`` iterations do not reach ``tol``.
    """
    kind = as_loss(kind)
    if not gamma > 0:
        raise ValueError(f"gamma must be positive, got {gamma}")
    s = as_mask(s, data.p)
    require_both_classes(data)
    prob = _InnerProblem(data, s, gamma, kind)
    if alpha0 is None:
        alpha = prob.start() if kind is Loss.LOGISTIC else np.zeros(data.n)
    else:
        alpha = prob.project(np.asarray(alpha0, dtype=float))

    if method in ("auto", "newton"):
        if kind is Loss.LOGISTIC:
            warm = None if alpha0 is None else alpha
            alpha, res, its = _logistic_primal_newton(prob, warm, tol, max_iter)
        else:
            # warm starts may sit on the boundary; pull them into the interior
            alpha = prob.start() if alpha0 is None else 0.9 * alpha + 0.1 * prob.start()
            alpha, res, its = _interior_point_qp(prob, alpha, tol, max_iter)
        tol = prob.attainable(alpha, tol)
        if res > tol:
            alpha, res, more = _spg(prob, alpha, tol, max_iter)
            its += more
    elif method == "spg":
        if kind is Loss.LOGISTIC and alpha0 is None:
            alpha = prob.start()
        alpha, res, its = _spg(prob, alpha, tol, max_iter)
    elif method == "pairwise":
        if kind is not Loss.HINGE:
            raise ValueError("the pairwise solver handles the hinge loss only")
        alpha, res, its = _pairwise_hinge(prob, alpha, tol, max_iter)
    else:
        raise ValueError(f"unknown method {method!r}")

    sol = _solution(data, s, alpha, gamma, kind, res, its)
    if res > prob.attainable(alpha, tol):
        raise DualBudgetError(
            f"inner dual residual {res:.3g} > tol {tol:.3g} after {its} iterations",
            sol,
        )
    return sol


def make_cut(sol, s):
    """Cut ``c(s') >= sol.objective + sol.grad' (s' - s)``."""
    s = np.asarray(s, dtype=float)
    return Cut(intercept=float(sol.objective - sol.grad @ s),
               coeffs=np.asarray(sol.grad, dtype=float), origin=s.copy())
