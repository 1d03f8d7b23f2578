"""Branch-and-bound for the cardinality-constrained master problem.

The master minimizes ``eta`` over supports ``s`` with ``sum(s) <= k`` subject
to ``eta >= a_i + g_i's`` for every cut in the pool. All cut coefficients are
nonpositive, so a single cut is minimized greedily by switching on its most
negative coordinates. Node bounds come from a Lagrangian relaxation over
convex combinations of the cuts, each term of which is again greedy.
"""
import heapq
import json
from dataclasses import dataclass, field

import numpy as np
from numba import njit

from .dual import Cut

DEFAULT_MASTER_TOL = 1e-9
DEFAULT_NODE_LIMIT = 200_000
DEFAULT_BOUND_STEPS = 50


class MasterBudgetError(RuntimeError):
    """Node limit hit; carries the incumbent and the remaining gap."""

    def __init__(self, message, incumbent, lower_bound):
        super().__init__(message)
        self.incumbent = incumbent
        self.lower_bound = lower_bound

    @property
    def gap(self):
        return max(self.incumbent.eta - self.lower_bound, 0.0)


class CutPool:
    """Append-only collection of cuts over a common dimension ``p``."""

    def __init__(self, p, cuts=()):
        self.p = int(p)
        self._a = []
        self._g = []
        self.cuts = []
        for cut in cuts:
            self.add(cut)

    def add(self, cut):
        coeffs = np.asarray(cut.coeffs, dtype=float)
        if coeffs.shape != (self.p,):
            raise ValueError(f"cut has dimension {coeffs.shape}, pool has {self.p}")
        if np.any(coeffs > 0):
            raise ValueError("cut coefficients must be nonpositive")
        self.cuts.append(cut)
        self._a.append(float(cut.intercept))
        self._g.append(coeffs)
        self._A = np.array(self._a)
        self._G = np.array(self._g)

    def __len__(self):
        return len(self.cuts)

    def __iter__(self):
        return iter(self.cuts)

    @property
    def intercepts(self):
        return self._A

    @property
    def coeffs(self):
        return self._G

    def values(self, s):
        """Every cut evaluated at ``s``."""
        return self._A + self._G @ np.asarray(s, dtype=float)

    def __call__(self, s):
        """Piecewise-linear lower model ``max_i cut_i(s)``."""
        return float(self.values(s).max())


@dataclass
class BnBNode:
    fixed_one: frozenset = frozenset()
    fixed_zero: frozenset = frozenset()
    lower_bound: float = -np.inf
    depth: int = 0

    def __post_init__(self):
        if self.fixed_one & self.fixed_zero:
            raise ValueError("a coordinate cannot be fixed to both 0 and 1")


@dataclass
class MasterSolution:
    s: np.ndarray
    eta: float
    nodes_explored: int = 0
    proof_gap: float = 0.0
    lower_bound: float = field(default=np.nan)

    @property
    def support(self):
        return np.flatnonzero(self.s > 0.5)


def _greedy(g, k, fixed_one, free):
    """Minimizer of ``g's`` over ``sum(s) <= k`` respecting the fixings.

    ``g`` has shape (p,) or (m, p); rows are handled independently. For a
    single row, equal coefficients go to the lowest index; for a block only
    the attained values matter, so any minimizer is returned.
    """
    if g.ndim == 1:
        return _greedy_row(g, k, fixed_one, free)
    s = np.zeros(g.shape, dtype=float)
    s[:, list(fixed_one)] = 1.0
    room = k - len(fixed_one)
    idx = np.flatnonzero(free)
    if room > 0 and idx.size:
        sub = g[:, idx]
        if room < idx.size:
            order = np.argpartition(sub, room - 1, axis=1)[:, :room]
        else:
            order = np.broadcast_to(np.arange(idx.size), sub.shape)
        take = np.take_along_axis(sub, order, axis=1) < 0
        rows = np.repeat(np.arange(g.shape[0]), order.shape[1])
        sel = take.ravel()
        s[rows[sel], idx[order.ravel()[sel]]] = 1.0
    return s


def _greedy_row(g, k, fixed_one, free):
    s = np.zeros(g.size)
    s[list(fixed_one)] = 1.0
    room = k - len(fixed_one)
    if room > 0:
        sub = np.where(free, g, np.inf)
        order = np.argsort(sub, kind="stable")[:room]
        s[order[sub[order] < 0]] = 1.0
    return s


def _free_mask(p, node):
    free = np.ones(p, dtype=bool)
    free[list(node.fixed_one)] = False
    free[list(node.fixed_zero)] = False
    return free


def single_cut_min(cut, k, fixed_one=(), fixed_zero=()):
    """Exact minimum of ``cut(s)`` over ``sum(s) <= k`` with fixings.

    Examples
    --------
    >>> from exactsparse.dual import Cut
    >>> cut = Cut(5.0, np.array([-3.0, -1.0, -2.0, 0.0]), np.zeros(4))
    >>> single_cut_min(cut, 2)
    0.0
    """
    g = np.asarray(cut.coeffs, dtype=float)
    node = BnBNode(frozenset(fixed_one), frozenset(fixed_zero))
    if len(node.fixed_one) > k:
        raise ValueError("more coordinates fixed to one than the budget k")
    s = _greedy_row(g, k, node.fixed_one, _free_mask(g.size, node))
    return float(cut.intercept + g @ s)


@njit(cache=True)
def _project_simplex(v):
    """Euclidean projection onto the probability simplex."""
    u = np.sort(v)[::-1]
    css = np.cumsum(u) - 1.0
    rho = 0
    for i in range(v.size):
        if u[i] * (i + 1) > css[i]:
            rho = i
    return np.maximum(v - css[rho] / (rho + 1.0), 0.0)


@njit(cache=True)
def _lagrangian(A0, Gf, lam, room, budget, cutoff, best):
    """Projected subgradient ascent on ``min_s sum_i lam_i cut_i(s)``.

    ``A0`` and ``Gf`` are the intercepts and free-column coefficients of the
    node. Returns the best value above ``best``, its multipliers and the
    free columns switched on (empty arrays when nothing beat ``best``).
    """
    m, f = Gf.shape
    lam_best = np.empty(0)
    sel_best = np.empty(0, dtype=np.int64)
    vals = np.empty(m)
    for t in range(1, budget + 1):
        g = lam @ Gf
        order = np.argsort(g, kind="mergesort")
        cnt = 0
        while cnt < min(room, f) and g[order[cnt]] < 0:
            cnt += 1
        sel = order[:cnt]
        value = 0.0
        for i in range(m):
            acc = A0[i]
            for j in sel:
                acc += Gf[i, j]
            vals[i] = acc
            value += lam[i] * acc
        if value > best:
            best = value
            lam_best = lam.copy()
            sel_best = sel.copy()
            if best >= cutoff:
                break
        h = vals - vals.mean()
        norm = np.sqrt(np.sum(h * h))
        if norm == 0.0:
            break
        lam = _project_simplex(lam + h / (norm * np.sqrt(t)))
    return best, lam_best, sel_best


def _bound(pool, node, k, budget, cutoff=np.inf, lam0=None):
    """Lower bound at ``node`` plus the multipliers and relaxed solution.

    Subgradient steps start from ``lam0`` (uniform when omitted) and stop
    early once the bound reaches ``cutoff``, where the node is pruned anyway.
    """
    A, G = pool.intercepts, pool.coeffs
    m = len(pool)
    free = _free_mask(pool.p, node)
    ones = list(node.fixed_one)
    # weak bound: each cut minimized on its own
    S = _greedy(G, k, node.fixed_one, free)
    singles = A + np.einsum("ij,ij->i", G, S)
    i = int(np.argmax(singles))
    best = float(singles[i])
    lam_best = np.zeros(m)
    lam_best[i] = 1.0
    s_best = S[i]
    room = k - len(ones)
    idx = np.flatnonzero(free)
    if m > 1 and best < cutoff and room > 0 and idx.size:
        # fixed ones fold into the intercepts
        A0 = A + G[:, ones].sum(axis=1)
        lam = np.full(m, 1.0 / m) if lam0 is None else lam0
        value, lam, sel = _lagrangian(A0, np.ascontiguousarray(G[:, idx]), lam,
                                      room, budget, cutoff, best)
        if lam.size:
            best, lam_best = value, lam
            s_best = np.zeros(pool.p)
            s_best[ones] = 1.0
            s_best[idx[sel]] = 1.0
    return best, lam_best, s_best


def node_lower_bound(pool, node, k, budget=DEFAULT_BOUND_STEPS):
    """Valid lower bound on ``min max_i cut_i(s)`` within ``node``.

    The larger of the best single-cut minimum and the best Lagrangian value
    ``min_s sum_i lam_i cut_i(s)`` seen over ``budget`` projected subgradient
    steps on the simplex, started at uniform weights.
    """
    if len(pool) == 0:
        raise ValueError("empty cut pool")
    return _bound(pool, node, k, budget)[0]


def solve_master(pool, k, incumbent=None, tol=DEFAULT_MASTER_TOL,
                 node_limit=DEFAULT_NODE_LIMIT, budget=DEFAULT_BOUND_STEPS,
                 trace=None):
    """Minimize ``max_i cut_i(s)`` over binary ``s`` with ``sum(s) <= k``.

    Best-first branch-and-bound. Nodes are ordered by bound, then deeper
    first, then creation order. Each node branches on the free coordinate
    with the largest multiplier-weighted coefficient magnitude.

    Parameters
    ----------
    pool : CutPool
    k : int
    incumbent : MasterSolution or array, optional
        Starting incumbent; its value is recomputed against ``pool``.
    tol : float
        Absolute optimality tolerance on ``eta``.
    node_limit : int
    budget : int
        Subgradient steps per node bound.
    trace : file-like, optional
        Receives one JSON record per explored node.

    Raises
    ------
    MasterBudgetError
        When ``node_limit`` nodes are explored before the gap closes.
    """
    if len(pool) == 0:
        raise ValueError("empty cut pool")
    p = pool.p
    if not 1 <= k <= p:
        raise ValueError(f"k must lie in [1, {p}], got {k}")

    best_s, best_eta = None, np.inf

    def offer(s):
        nonlocal best_s, best_eta
        eta = pool(s)
        if eta < best_eta:
            best_s, best_eta = s.copy(), eta

    if incumbent is not None:
        s0 = getattr(incumbent, "s", incumbent)
        s0 = (np.asarray(s0, dtype=float) > 0.5).astype(float)
        if s0.sum() <= k:
            offer(s0)

    root = BnBNode()
    bound, lam, s_rel = _bound(pool, root, k, budget)
    root.lower_bound = bound
    offer(s_rel)
    counter = 0
    heap = [(bound, 0, counter, root, lam)]
    explored = 0
    while heap:
        bound, _, _, node, lam = heapq.heappop(heap)
        if bound >= best_eta - tol:
            # every remaining node is at least this bad
            heap.clear()
            heap.append((bound, 0, 0, node, lam))
            break
        explored += 1
        if trace is not None:
            trace.write(json.dumps({
                "node": explored, "fixed": len(node.fixed_one) + len(node.fixed_zero),
                "bound": bound, "incumbent": best_eta,
            }) + "\n")
        if explored > node_limit:
            lower = min(bound, min((h[0] for h in heap), default=bound))
            sol = MasterSolution(best_s, best_eta, explored - 1,
                                 max(best_eta - lower, 0.0), lower)
            raise MasterBudgetError(
                f"master node limit {node_limit} reached, gap {sol.proof_gap:.3g}",
                sol, lower)
        free = _free_mask(p, node)
        if len(node.fixed_one) >= k:
            free[:] = False
        if not free.any():
            continue
        weight = np.abs(lam @ pool.coeffs)
        weight[~free] = -1.0
        j = int(np.argmax(weight))
        children = (
            BnBNode(node.fixed_one | {j}, node.fixed_zero, depth=node.depth + 1),
            BnBNode(node.fixed_one, node.fixed_zero | {j}, depth=node.depth + 1),
        )
        for child in children:
            cb, clam, cs = _bound(pool, child, k, budget, best_eta - tol, lam)
            child.lower_bound = max(cb, bound)
            offer(cs)
            if child.lower_bound < best_eta - tol:
                counter += 1
                heapq.heappush(heap, (child.lower_bound, -child.depth, counter,
                                      child, clam))

    lower = min(best_eta, heap[0][0]) if heap else best_eta
    return MasterSolution(best_s, best_eta, explored,
                          max(best_eta - lower, 0.0), lower)
