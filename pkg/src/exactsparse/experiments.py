"""Replicated synthetic experiments producing one tidy row per fit.

A sweep draws one instance per (n, replication), fits every configured
method on it and scores the fit against the planted support and on a fresh
validation sample from the same model. Rows come back in (n, seed, method)
order whatever the number of workers.
"""
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .datagen import SyntheticConfig, make_instance, make_validation
from .lasso import LassoBudgetError, fit_lasso_logistic, fit_lasso_svm, lambda_grid
from .losses import Loss
from .metrics import auc, cross_validate, misclass_rate, recovery
from .oa import DEFAULT_GAMMA_SCALE, FitOptions, fit_sparse

METHODS = {
    "sparse-logistic": ("sparse", Loss.LOGISTIC),
    "sparse-svm": ("sparse", Loss.HINGE),
    "lasso-logistic": ("lasso", Loss.LOGISTIC),
    "lasso-svm": ("lasso", Loss.HINGE),
}

SWEEP_COLUMNS = [
    "method", "n", "seed", "k", "k_star", "gamma", "lambda", "A", "F",
    "support_size", "auc", "misclass", "cuts_used", "certified", "wall_time",
    "error",
]


def parse_method(name):
    try:
        return METHODS[name]
    except KeyError:
        raise ValueError(f"unknown method {name!r}; choose from {sorted(METHODS)}") from None


@dataclass(frozen=True)
class SweepConfig:
    """Grid, generative model and fit settings for :func:`run_sweep`.

    ``gamma_scale`` sets ``gamma = gamma_scale / n_fit`` where ``n_fit`` is
    the number of samples the model is fitted on. With ``cv`` the sparsity
    (or the lasso penalty) is chosen on an 80/20 split of the training data
    and the model is then refitted on all of it.
    """

    n_grid: tuple = (100, 200, 400, 600)
    p: int = 200
    k_true: int = 10
    rho: float = 0.3
    snr: float = math.inf
    label_model: str = "logistic"
    seeds: int = 10
    seed: int = 0
    methods: tuple = ("sparse-logistic", "lasso-logistic")
    k: int | None = None
    cv: bool = False
    k_grid: tuple = ()
    gamma_scale: float = DEFAULT_GAMMA_SCALE
    max_cuts: int = 40
    node_limit: int = 1000
    n_val: int = 200
    lasso_grid: int = 30
    record_time: bool = False
    workers: int = 1

    def __post_init__(self):
        if self.seeds < 1:
            raise ValueError("seeds must be at least 1")
        if not self.n_grid:
            raise ValueError("n_grid must be nonempty")
        for m in self.methods:
            parse_method(m)
        if self.cv and not self.k_grid and any(m.startswith("sparse") for m in self.methods):
            raise ValueError("cross-validated sparse fits need a k_grid")
        if self.n_val < 2:
            raise ValueError("n_val must be at least 2")

    @property
    def fit_k(self):
        return self.k_true if self.k is None else self.k

    def instance_config(self, n, rep):
        return SyntheticConfig(n=n, p=self.p, k_true=self.k_true, rho=self.rho,
                               snr=self.snr, label_model=self.label_model,
                               seed=self.seed + rep)


def _lasso_fn(kind):
    return fit_lasso_logistic if kind is Loss.LOGISTIC else fit_lasso_svm


def _fit_lasso(data, lam, kind):
    try:
        return _lasso_fn(kind)(data, lam)
    except LassoBudgetError as err:
        return err.best


def _lasso_at_size(data, kind, k, count):
    """Path fit whose support is the largest one not exceeding ``k``."""
    grid = lambda_grid(data, count, "logistic" if kind is Loss.LOGISTIC else "hinge")
    chosen, w, b = None, None, None
    for lam in grid:
        try:
            fit = _lasso_fn(kind)(data, lam, w0=w, b0=b)
        except LassoBudgetError as err:
            fit = err.best
        w, b = fit.w, fit.b
        if fit.support_size > k:
            break
        chosen = fit
    return chosen


def _sparse_opts(cfg, kind, n):
    return FitOptions(gamma=cfg.gamma_scale / n, kind=kind, max_cuts=cfg.max_cuts,
                      node_limit=cfg.node_limit)


def run_one(cfg, n, rep, method):
    """Fit ``method`` on replication ``rep`` at sample size ``n``; one row."""
    family, kind = parse_method(method)
    inst = make_instance(cfg.instance_config(n, rep))
    valid = make_validation(inst, cfg.n_val)
    data = inst.data
    row = {"method": method, "n": n, "seed": cfg.seed + rep}
    start = time.perf_counter()
    try:
        if family == "sparse":
            k = cfg.fit_k
            if cfg.cv:
                fit_opts = {"max_cuts": cfg.max_cuts, "node_limit": cfg.node_limit}
                n_train = int(round(0.8 * n))
                res = cross_validate(data, cfg.k_grid, [cfg.gamma_scale / n_train],
                                     "sparse", kind, seed=cfg.seed + rep,
                                     fit_options=fit_opts)
                k = res.k_star
                row["k_star"] = k
            opts = _sparse_opts(cfg, kind, n)
            fit = fit_sparse(data, k, opts)
            w, b = fit.w, fit.b
            row.update(k=k, gamma=opts.gamma, cuts_used=fit.cuts_used,
                       certified=fit.certified)
        else:
            if cfg.cv:
                res = cross_validate(data, method="lasso", kind=kind,
                                     seed=cfg.seed + rep, lambda_count=cfg.lasso_grid)
                fit = _fit_lasso(data, res.lambda_star, kind)
            else:
                fit = _lasso_at_size(data, kind, cfg.fit_k, cfg.lasso_grid)
            w, b = fit.w, fit.b
            row.update(k=fit.support_size, **{"lambda": fit.lam})
        rep_ = recovery(w, inst.w_true)
        scores = valid.X @ w + b
        row.update(A=rep_.accuracy_count, F=rep_.false_count,
                   support_size=rep_.support_size, auc=auc(scores, valid.y),
                   misclass=misclass_rate(np.where(scores > 0, 1.0, -1.0), valid.y))
    except Exception as err:  # recorded per row, the sweep continues
        row["error"] = f"{type(err).__name__}: {err}"
    if cfg.record_time:
        row["wall_time"] = time.perf_counter() - start
    return row


def _run_job(args):
    return run_one(*args)


def run_sweep(cfg, progress=None):
    """All rows of the sweep, in (n, seed, method) order."""
    jobs = [(cfg, n, rep, m) for n in cfg.n_grid for rep in range(cfg.seeds)
            for m in cfg.methods]
    if cfg.workers <= 1:
        rows = []
        for job in jobs:
            rows.append(run_one(*job))
            if progress is not None:
                progress(rows[-1])
        return rows
    with ProcessPoolExecutor(max_workers=cfg.workers) as ex:
        rows = list(ex.map(_run_job, jobs))
    if progress is not None:
        for row in rows:
            progress(row)
    return rows


def summarize(rows, key="n"):
    """Per-(method, key) means of the numeric columns, skipping failed rows."""
    groups = {}
    for row in rows:
        if row.get("error"):
            continue
        groups.setdefault((row["method"], row[key]), []).append(row)
    out = []
    for (method, value), rs in sorted(groups.items(), key=lambda t: (t[0][0], t[0][1])):
        agg = {"method": method, key: value, "count": len(rs)}
        for col in ("A", "F", "support_size", "auc", "misclass", "cuts_used", "k_star"):
            vals = [r[col] for r in rs if r.get(col) is not None]
            if vals:
                agg[col] = float(np.mean(vals))
        out.append(agg)
    return out
