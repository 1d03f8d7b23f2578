"""Closed forms for support recovery by misclassification minimization.

The data model is ``y = sign(x'w* + eps)`` with ``x ~ N(0, I)``,
``eps ~ N(0, sigma2)`` and a binary truth ``w*`` with ``k`` ones. A binary
candidate ``w`` with ``k`` ones sharing ``ell`` of them with ``w*`` misclassifies
with probability ``q(ell; k, sigma2)``. Logarithms are natural throughout.

Each closed form has a Monte Carlo counterpart (``mc_*``) that returns an
estimate and its standard error. Samples are drawn in batches, each with its
own child seed, and combined through their sums so the result does not
depend on how the batches are scheduled.
"""
import math
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .datagen import sign

ENUMERATION_LIMIT = 10**6
MC_BATCH = 250_000


@dataclass(frozen=True)
class TheoryParams:
    k: int
    ell: int
    sigma2: float = 0.0
    p: int | None = None

    def __post_init__(self):
        if self.k < 1:
            raise ValueError(f"k must be positive, got {self.k}")
        if not 0 <= self.ell <= self.k:
            raise ValueError(f"ell must lie in [0, k], got {self.ell}")
        if self.p is not None and self.p < self.k:
            raise ValueError(f"p must be at least k, got p={self.p}, k={self.k}")
        if not self.sigma2 >= 0:
            raise ValueError(f"sigma2 must be nonnegative, got {self.sigma2}")

    @property
    def scale(self):
        """``sqrt(k (k + sigma2))``."""
        return math.sqrt(self.k * (self.k + self.sigma2))


@dataclass(frozen=True)
class DeltaStat:
    value: float
    z_counts: dict


def _clip_unit(x):
    return min(1.0, max(-1.0, x))


def orthant2(rho):
    """``P(n1 >= 0, n2 >= 0)`` for a standard bivariate normal with correlation rho.

    >>> orthant2(0.0)
    0.25
    """
    if not -1.0 <= rho <= 1.0:
        raise ValueError(f"rho must lie in [-1, 1], got {rho}")
    return (math.pi / 2 + math.asin(rho)) / (2 * math.pi)


def _check_correlation(r12, r13, r23):
    for r in (r12, r13, r23):
        if not -1.0 <= r <= 1.0:
            raise ValueError(f"correlations must lie in [-1, 1], got {r}")
    # all principal minors of a 3x3 correlation matrix
    det = 1 + 2 * r12 * r13 * r23 - r12**2 - r13**2 - r23**2
    if det < -1e-12:
        raise ValueError("correlation matrix is not positive semidefinite")


def orthant3(r12, r13, r23):
    """Positive-orthant probability of a standard trivariate normal."""
    _check_correlation(r12, r13, r23)
    return (math.pi / 2 + math.asin(r12) + math.asin(r13) + math.asin(r23)) / (4 * math.pi)


def disagreement_prob(w, w_prime, sigma):
    """``P(sign(x'w) != sign(x'w' + eps))`` with ``eps ~ N(0, sigma^2)``."""
    w = np.asarray(w, dtype=float)
    w_prime = np.asarray(w_prime, dtype=float)
    if w.shape != w_prime.shape:
        raise ValueError(f"shape mismatch: {w.shape} vs {w_prime.shape}")
    if sigma < 0:
        raise ValueError(f"sigma must be nonnegative, got {sigma}")
    nw = np.linalg.norm(w)
    if nw == 0:
        raise ValueError("w must be nonzero")
    den = nw * math.sqrt(w_prime @ w_prime + sigma * sigma)
    if den == 0:
        # x'w' + eps is identically zero, its sign is a constant
        return 0.5
    return math.acos(_clip_unit(float(w @ w_prime) / den)) / math.pi


def q_of_ell(params):
    """Misclassification probability of a candidate with accuracy ``ell``."""
    return math.acos(_clip_unit(params.ell / params.scale)) / math.pi


def z_probabilities(params):
    """``(P(Z=-1), P(Z=0), P(Z=+1))`` for one sample of ``Delta(w, w*)``.

    ``Z = +1`` when only ``w`` errs and ``-1`` when only ``w*`` errs.
    """
    k, ell, s = params.k, params.ell, params.scale
    a, b, c = math.asin(_clip_unit(ell / s)), math.asin(_clip_unit(k / s)), math.asin(ell / k)
    plus = (math.pi / 2 - a + b - c) / (2 * math.pi)
    minus = (math.pi / 2 + a - b - c) / (2 * math.pi)
    return minus, 1.0 - plus - minus, plus


def exact_mean_z(params):
    s = params.scale
    return (math.acos(_clip_unit(params.ell / s))
            - math.acos(_clip_unit(params.k / s))) / math.pi


def mean_z_lower_bound(params):
    """Tangent-line lower bound on ``E[Z]``, valid for ``ell < k``."""
    if params.ell >= params.k:
        raise ValueError("the bound needs ell < k")
    k, ell = params.k, params.ell
    return (k - ell) / (math.pi * math.sqrt(k * (k + params.sigma2) - ell * ell))


def large_dev_bound(n, params):
    """Upper bound on ``P(Delta(w, w*) <= 0)`` for ``n`` samples."""
    if params.ell >= params.k:
        raise ValueError("the bound needs ell < k")
    if n < 0:
        raise ValueError(f"n must be nonnegative, got {n}")
    k, ell = params.k, params.ell
    rate = (k - ell) ** 2 / (2 * math.pi**2 * (k * (k + params.sigma2) - ell * ell))
    return math.exp(-n * rate)


def n0_threshold(k, p, sigma2):
    """``ceil(6 pi^2 (2 + sigma2) k log(p - k))``; requires ``p >= 2k``.

    >>> n0_threshold(30, 1000, 0.0)
    24436
    """
    if k < 1:
        raise ValueError(f"k must be positive, got {k}")
    if p < 2 * k:
        raise ValueError(f"the sample-size threshold needs p >= 2k, got p={p}, k={k}")
    if sigma2 < 0:
        raise ValueError(f"sigma2 must be nonnegative, got {sigma2}")
    return math.ceil(6 * math.pi**2 * (2 + sigma2) * k * math.log(p - k))


def failure_tail(n, k, p, sigma2):
    """Bound on the probability that the misclassification minimizer is wrong.

    Only claimed for ``n >= n0_threshold(k, p, sigma2)``.
    """
    n0 = n0_threshold(k, p, sigma2)
    if n < n0:
        raise ValueError(f"the tail bound holds for n >= {n0}, got n={n}")
    return math.exp(-(n - n0) / (2 * math.pi**2 * k * (sigma2 + 2)))


def predictions(X, w):
    """``sign(Xw)`` with ``sign(0) = -1``."""
    return sign(np.asarray(X, dtype=float) @ np.asarray(w, dtype=float))


def brute_force_min(data, k):
    """Binary support of size ``k`` with the fewest training errors.

    Enumerates all ``C(p, k)`` supports in lexicographic order and keeps the
    first minimizer.
    """
    p = data.p
    if not 1 <= k <= p:
        raise ValueError(f"k must lie in [1, {p}], got {k}")
    total = math.comb(p, k)
    if total > ENUMERATION_LIMIT:
        raise ValueError(f"C({p}, {k}) = {total} supports exceeds the enumeration limit")
    X, y = data.X, data.y
    best_err, best = None, None
    # chunks keep the n x chunk score matrix small
    chunk = max(1, min(total, 2**22 // max(1, data.n)))
    it = combinations(range(p), k)
    while True:
        block = np.array(list(_take(it, chunk)), dtype=np.int64)
        if block.size == 0:
            break
        scores = X[:, block].sum(axis=2)
        errors = np.count_nonzero(sign(scores) != y[:, None], axis=0)
        j = int(np.argmin(errors))
        if best_err is None or errors[j] < best_err:
            best_err, best = int(errors[j]), block[j]
    s = np.zeros(p)
    s[best] = 1.0
    return s


def _take(it, m):
    for _, item in zip(range(m), it):
        yield item


def delta_stat(data, w1, w2):
    """Difference of empirical error rates of two classifiers."""
    y = data.y
    e1 = (predictions(data.X, w1) != y).astype(int)
    e2 = (predictions(data.X, w2) != y).astype(int)
    z = e1 - e2
    counts = {v: int(np.count_nonzero(z == v)) for v in (-1, 0, 1)}
    return DeltaStat(float(z.sum()) / data.n, counts)


# Monte Carlo validators

def _mc(draw, samples, seed, batch=MC_BATCH):
    """Mean and standard error of ``draw(rng, m)`` over ``samples`` draws."""
    if samples < 2:
        raise ValueError("need at least two samples")
    sizes = [batch] * (samples // batch)
    if samples % batch:
        sizes.append(samples % batch)
    children = np.random.SeedSequence(seed).spawn(len(sizes))
    total, total_sq = 0.0, 0.0
    for m, child in zip(sizes, children):
        v = np.asarray(draw(np.random.default_rng(child), m), dtype=float)
        total += v.sum()
        total_sq += (v * v).sum()
    mean = total / samples
    var = max(total_sq / samples - mean * mean, 0.0) * samples / (samples - 1)
    return mean, math.sqrt(var / samples)


def _correlated(rng, m, corr):
    corr = np.asarray(corr, dtype=float)
    vals, vecs = np.linalg.eigh(corr)
    root = vecs * np.sqrt(np.clip(vals, 0.0, None))
    return rng.standard_normal((m, corr.shape[0])) @ root.T


def mc_orthant2(rho, samples=10**6, seed=0):
    def draw(rng, m):
        z = _correlated(rng, m, [[1, rho], [rho, 1]])
        return np.all(z >= 0, axis=1)
    return _mc(draw, samples, seed)


def mc_orthant3(r12, r13, r23, samples=10**6, seed=0):
    _check_correlation(r12, r13, r23)
    corr = [[1, r12, r13], [r12, 1, r23], [r13, r23, 1]]

    def draw(rng, m):
        return np.all(_correlated(rng, m, corr) >= 0, axis=1)
    return _mc(draw, samples, seed)


def mc_disagreement(w, w_prime, sigma, samples=10**6, seed=0):
    w = np.asarray(w, dtype=float)
    w_prime = np.asarray(w_prime, dtype=float)

    def draw(rng, m):
        x = rng.standard_normal((m, w.size))
        noisy = x @ w_prime + sigma * rng.standard_normal(m)
        return sign(x @ w) != sign(noisy)
    return _mc(draw, samples, seed)


def planted_pair(params):
    """A truth and a candidate with ``ell`` shared ones in ``2k - ell`` dimensions."""
    k, ell = params.k, params.ell
    dim = 2 * k - ell
    w_star = np.zeros(dim)
    w_star[:k] = 1.0
    w = np.zeros(dim)
    w[k - ell:2 * k - ell] = 1.0
    return w_star, w


def _z_draw(params, w_star, w):
    sd = math.sqrt(params.sigma2)

    def draw(rng, m):
        x = rng.standard_normal((m, w.size))
        y = sign(x @ w_star + sd * rng.standard_normal(m))
        err_w = predictions(x, w) != y
        err_star = predictions(x, w_star) != y
        return err_w.astype(int) - err_star.astype(int)
    return draw


def mc_mean_z(params, samples=10**6, seed=0):
    w_star, w = planted_pair(params)
    return _mc(_z_draw(params, w_star, w), samples, seed)


def mc_misclass(params, samples=10**6, seed=0):
    """Error rate of the planted candidate; concentrates at ``q_of_ell``."""
    w_star, w = planted_pair(params)
    sd = math.sqrt(params.sigma2)

    def draw(rng, m):
        x = rng.standard_normal((m, w.size))
        y = sign(x @ w_star + sd * rng.standard_normal(m))
        return predictions(x, w) != y
    return _mc(draw, samples, seed)


def mc_delta_nonpositive(n, params, trials=10**4, seed=0):
    """Frequency of ``Delta(w, w*) <= 0`` over datasets of size ``n``."""
    w_star, w = planted_pair(params)
    draw_z = _z_draw(params, w_star, w)

    def draw(rng, m):
        z = draw_z(rng, m * n).reshape(m, n)
        return z.sum(axis=1) <= 0
    return _mc(draw, trials, seed, batch=max(1, MC_BATCH // max(n, 1)))


def mc_failure_frequency(n, k, p, sigma2, trials=10**4, seed=0):
    """Frequency with which :func:`brute_force_min` misses the planted support.

    The truth is placed on the first ``k`` coordinates; by symmetry of the
    Gaussian design the position does not matter.
    """
    supports = np.array(list(combinations(range(p), k)), dtype=np.int64)
    if supports.shape[0] > ENUMERATION_LIMIT:
        raise ValueError("too many supports to enumerate")
    truth = 0  # index of range(k) among the lexicographic supports
    sd = math.sqrt(sigma2)

    def draw(rng, m):
        out = np.empty(m, dtype=bool)
        for t in range(m):
            X = rng.standard_normal((n, p))
            y = sign(X[:, :k].sum(axis=1) + sd * rng.standard_normal(n))
            errors = np.count_nonzero(sign(X[:, supports].sum(axis=2)) != y[:, None],
                                      axis=0)
            out[t] = int(np.argmin(errors)) != truth
        return out
    return _mc(draw, trials, seed, batch=1000)


def validator_rows(samples=10**6, seed=0):
    """Closed form, estimate and standard error on a fixed parameter grid."""
    rows = []

    def add(name, params, exact, est):
        mean, se = est
        rows.append({"quantity": name, "params": params, "closed_form": exact,
                     "estimate": mean, "std_error": se})

    for rho in (-0.5, 0.0, 0.3, 0.8):
        add("orthant2", f"rho={rho}", orthant2(rho), mc_orthant2(rho, samples, seed))
    for r in ((0.3, 0.2, 0.1), (0.5, -0.2, 0.4), (0.0, 0.0, 0.0)):
        add("orthant3", "r=" + "/".join(map(str, r)), orthant3(*r),
            mc_orthant3(*r, samples, seed))
    for k, ell, s2 in ((2, 0, 0.0), (2, 1, 0.25), (3, 2, 1.0), (5, 2, 0.5)):
        par = TheoryParams(k=k, ell=ell, sigma2=s2)
        tag = f"k={k} ell={ell} sigma2={s2}"
        add("q_of_ell", tag, q_of_ell(par), mc_misclass(par, samples, seed))
        add("exact_mean_z", tag, exact_mean_z(par), mc_mean_z(par, samples, seed))
        w_star, w = planted_pair(par)
        add("disagreement_prob", tag, disagreement_prob(w, w_star, math.sqrt(s2)),
            mc_disagreement(w, w_star, math.sqrt(s2), samples, seed))
    return rows


__all__ = [
    "TheoryParams", "DeltaStat", "orthant2", "orthant3", "disagreement_prob",
    "q_of_ell", "z_probabilities", "exact_mean_z", "mean_z_lower_bound",
    "large_dev_bound", "n0_threshold", "failure_tail", "brute_force_min",
    "delta_stat", "predictions", "planted_pair", "mc_orthant2", "mc_orthant3",
    "mc_disagreement", "mc_mean_z", "mc_misclass", "mc_delta_nonpositive",
    "mc_failure_frequency", "validator_rows",
]
