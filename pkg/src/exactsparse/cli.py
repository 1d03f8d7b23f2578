"""Command-line interface: ``exactsparse {gen,fit,sweep,theory,cv}``.

Settings come from an INI file (one section per command, ``--config``) and
are overridden by flags. The output directory defaults to ``$EXACTSPARSE_OUT``
or the current directory.

Exit status: 0 when the fit is certified or converged, 3 when a budget ran
out first (the best point found is still written), 2 on usage or input
errors.
"""
import argparse
import configparser
import dataclasses
import math
import os
import sys
import time

import numpy as np

from . import theory
from .datagen import SyntheticConfig, make_instance
from .experiments import METHODS, SWEEP_COLUMNS, SweepConfig, parse_method, run_sweep
from .io import CSVParseError, load_csv, write_dataset_csv, write_report, write_table
from .lasso import LassoBudgetError, fit_lasso_logistic, fit_lasso_svm, lambda_max
from .losses import Loss
from .metrics import cross_validate
from .oa import FitOptions, fit_sparse

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_BUDGET = 3

THEORY_COLUMNS = ["quantity", "relation", "params", "closed_form", "estimate",
                  "std_error"]
CV_COLUMNS = ["method", "k", "gamma", "lambda", "auc", "misclass", "support_size",
              "certified", "cuts_used", "converged"]


class UsageError(Exception):
    pass


# config handling

def _parse_value(text, default):
    text = text.strip()
    if isinstance(default, bool):
        low = text.lower()
        if low in ("1", "true", "yes", "on"):
            return True
        if low in ("0", "false", "no", "off"):
            return False
        raise UsageError(f"not a boolean: {text!r}")
    if isinstance(default, tuple):
        items = [t.strip() for t in text.split(",") if t.strip()]
        conv = type(default[0]) if default else _guess
        return tuple(conv(t) for t in items)
    if isinstance(default, int) or default is None and text.lstrip("-").isdigit():
        return int(text)
    if isinstance(default, float):
        return float(text)
    return text


def _guess(text):
    try:
        return int(text)
    except ValueError:
        return float(text)


def read_section(path, section):
    """Key-value pairs of one INI section; empty when no file is given."""
    if path is None:
        return {}
    cp = configparser.ConfigParser()
    try:
        with open(path, encoding="utf-8") as fh:
            cp.read_file(fh)
    except OSError as err:
        raise UsageError(f"{path}: cannot read config ({err.strerror})") from err
    except configparser.Error as err:
        raise UsageError(f"{path}: {err}") from err
    return dict(cp[section]) if cp.has_section(section) else {}


def build(cls, values):
    """Instantiate a dataclass from string values, typed by its defaults."""
    fields = {f.name: f for f in dataclasses.fields(cls)}
    kwargs = {}
    for key, text in values.items():
        key = key.replace("-", "_")
        if key not in fields:
            raise UsageError(f"unknown setting {key!r} for {cls.__name__}")
        default = fields[key].default
        if default is dataclasses.MISSING:
            default = 0
        try:
            kwargs[key] = _parse_value(text, default)
        except (ValueError, UsageError) as err:
            raise UsageError(f"setting {key!r}: {err}") from None
    try:
        return cls(**kwargs)
    except (TypeError, ValueError) as err:
        raise UsageError(str(err)) from None


def out_dir(args):
    path = args.out or os.environ.get("EXACTSPARSE_OUT") or "."
    os.makedirs(path, exist_ok=True)
    return path


# commands

def cmd_gen(args):
    values = read_section(args.config, "gen")
    for key in ("n", "p", "k_true", "rho", "snr", "label_model", "truth_model",
                "sigma2", "seed"):
        v = getattr(args, key, None)
        if v is not None:
            values[key] = str(v)
    for key in ("n", "p", "k_true"):
        if key not in values:
            raise UsageError(f"gen needs {key} (flag or config)")
    cfg = build(SyntheticConfig, values)
    inst = make_instance(cfg)
    where = out_dir(args)
    data_path = os.path.join(where, "data.csv")
    write_dataset_csv(data_path, inst.data)
    names = inst.data.feature_names()
    write_table(os.path.join(where, "truth.csv"),
                [{"feature": names[j], "index": j, "w_true": inst.w_true[j]}
                 for j in range(cfg.p)],
                ["feature", "index", "w_true"])
    pos = int(np.count_nonzero(inst.data.y > 0))
    print(f"wrote {data_path}: n={cfg.n} p={cfg.p} k_true={cfg.k_true} "
          f"positives={pos} negatives={cfg.n - pos} snr={inst.achieved_snr:g}")
    return EXIT_OK


def _load(args):
    if not args.data:
        raise UsageError("--data is required")
    return load_csv(args.data, standardize=args.standardize)


def cmd_fit(args):
    values = read_section(args.config, "fit")
    method = args.method or values.get("method")
    if method is None:
        raise UsageError(f"--method is required; choose from {sorted(METHODS)}")
    try:
        family, kind = parse_method(method)
    except ValueError as err:
        raise UsageError(str(err)) from None
    data = _load(args)
    names = data.feature_names()
    report = {"method": method, "n": data.n, "p": data.p}
    start = time.perf_counter()
    if family == "sparse":
        k = args.k if args.k is not None else values.get("k")
        if k is None:
            raise UsageError("sparse methods need --k")
        k = int(k)
        gamma = args.gamma if args.gamma is not None else values.get("gamma")
        opts = FitOptions(
            gamma=None if gamma is None else float(gamma), kind=kind,
            max_cuts=int(args.max_cuts or values.get("max_cuts", 200)),
            node_limit=int(args.node_limit or values.get("node_limit", 200_000)),
            inner_tol=args.tol or float(values.get("tol", 1e-8)),
        )
        res = fit_sparse(data, k, opts)
        ok = res.certified
        report.update(k=k, gamma=res.gamma, w=res.w, b=res.b, objective=res.objective,
                      lower_bound=res.lower_bound, cuts_used=res.cuts_used,
                      certified=res.certified, support=res.support.tolist())
    else:
        lam = args.lam if args.lam is not None else values.get("lambda")
        if lam is None:
            raise UsageError("lasso methods need --lambda")
        lam = float(lam)
        fn = fit_lasso_logistic if kind is Loss.LOGISTIC else fit_lasso_svm
        tol = args.tol or values.get("tol")
        try:
            fit = fn(data, lam) if tol is None else fn(data, lam, tol=float(tol))
            ok = True
        except LassoBudgetError as err:
            fit, ok = err.best, False
        report.update(**{"lambda": lam}, lambda_max=lambda_max(
            data, "logistic" if kind is Loss.LOGISTIC else "hinge"),
            w=fit.w, b=fit.b, objective=fit.objective, residual=fit.residual,
            converged=ok, support=fit.support.tolist(), mu=fit.mu)
    report["support_names"] = [names[j] for j in report["support"]]
    if args.record_time:
        report["wall_time"] = time.perf_counter() - start
    path = os.path.join(out_dir(args), "fit.json")
    write_report(path, report)
    status = "certified" if family == "sparse" and ok else "converged" if ok else "budget exhausted"
    print(f"{method}: support {report['support']} objective {report['objective']:.10g} "
          f"({status}); wrote {path}")
    return EXIT_OK if ok else EXIT_BUDGET


def _sweep_config(args):
    values = read_section(args.config, "sweep")
    if args.seed is not None:
        values["seed"] = str(args.seed)
    if args.workers is not None:
        values["workers"] = str(args.workers)
    if args.record_time:
        values["record_time"] = "true"
    if args.method:
        values["methods"] = args.method
    if args.k is not None:
        values["k"] = str(args.k)
    return build(SweepConfig, values)


def cmd_sweep(args):
    cfg = _sweep_config(args)
    rows = run_sweep(cfg, progress=None if args.quiet else _progress)
    path = os.path.join(out_dir(args), "sweep.csv")
    write_table(path, rows, SWEEP_COLUMNS)
    failed = sum(1 for r in rows if r.get("error"))
    print(f"wrote {path}: {len(rows)} rows, {failed} failed")
    return EXIT_OK


def _progress(row):
    tail = row.get("error") or f"A={row.get('A')} F={row.get('F')}"
    print(f"  {row['method']} n={row['n']} seed={row['seed']}: {tail}", file=sys.stderr)


@dataclasses.dataclass(frozen=True)
class TheoryConfig:
    samples: int = 10**6
    trials: int = 2000
    seed: int = 0
    k: int = 2
    p: int = 6
    sigma2_grid: tuple = (0.0, 0.25, 1.0)
    n_grid: tuple = (1, 5, 20, 100)
    tail_offsets: tuple = (0, 50)


def cmd_theory(args):
    values = read_section(args.config, "theory")
    if args.seed is not None:
        values["seed"] = str(args.seed)
    if args.samples is not None:
        values["samples"] = str(args.samples)
    cfg = build(TheoryConfig, values)
    rows = []
    for r in theory.validator_rows(cfg.samples, cfg.seed):
        rows.append({**r, "relation": "equal"})
    for s2 in cfg.sigma2_grid:
        n0 = theory.n0_threshold(cfg.k, cfg.p, s2)
        tag = f"k={cfg.k} p={cfg.p} sigma2={s2}"
        rows.append({"quantity": "n0_threshold", "relation": "value", "params": tag,
                     "closed_form": n0})
        for n in cfg.n_grid:
            for ell in range(cfg.k):
                par = theory.TheoryParams(cfg.k, ell, s2, cfg.p)
                est, se = theory.mc_delta_nonpositive(n, par, cfg.trials, cfg.seed)
                rows.append({"quantity": "large_dev_bound", "relation": "upper_bound",
                             "params": f"{tag} ell={ell} n={n}",
                             "closed_form": theory.large_dev_bound(n, par),
                             "estimate": est, "std_error": se})
        for off in cfg.tail_offsets:
            n = n0 + off
            est, se = theory.mc_failure_frequency(n, cfg.k, cfg.p, s2, cfg.trials, cfg.seed)
            rows.append({"quantity": "failure_tail", "relation": "upper_bound",
                         "params": f"{tag} n={n}",
                         "closed_form": theory.failure_tail(n, cfg.k, cfg.p, s2),
                         "estimate": est, "std_error": se})
    path = os.path.join(out_dir(args), "theory.csv")
    write_table(path, rows, THEORY_COLUMNS)
    bad = [r for r in rows if _theory_violation(r)]
    print(f"wrote {path}: {len(rows)} rows, {len(bad)} outside 3 standard errors")
    return EXIT_OK


def _theory_violation(row):
    est, se = row.get("estimate"), row.get("std_error")
    if est is None:
        return False
    slack = 3 * se
    if row["relation"] == "equal":
        return abs(est - row["closed_form"]) > slack
    return est - slack > row["closed_form"]


def cmd_cv(args):
    values = read_section(args.config, "cv")
    method = args.method or values.get("method")
    if method is None:
        raise UsageError(f"--method is required; choose from {sorted(METHODS)}")
    try:
        family, kind = parse_method(method)
    except ValueError as err:
        raise UsageError(str(err)) from None
    data = _load(args)
    seed = args.seed if args.seed is not None else int(values.get("seed", 0))
    split = args.split or float(values.get("split", 0.8))
    workers = args.workers or int(values.get("workers", 1))
    if family == "sparse":
        k_grid = args.k_grid or values.get("k_grid")
        if not k_grid:
            raise UsageError("sparse cross-validation needs --k-grid")
        k_grid = [int(t) for t in str(k_grid).split(",")]
        g = args.gamma_grid or values.get("gamma_grid")
        gammas = None if g is None else [float(t) for t in str(g).split(",")]
        fit_opts = {"max_cuts": int(values.get("max_cuts", 200)),
                    "node_limit": int(values.get("node_limit", 200_000))}
        res = cross_validate(data, k_grid, gammas, "sparse", kind, split, seed,
                             fit_options=fit_opts, workers=workers)
        chosen = f"k*={res.k_star} gamma*={res.gamma_star:.6g}"
    else:
        res = cross_validate(data, method="lasso", kind=kind, train_fraction=split,
                             seed=seed, workers=workers)
        chosen = f"lambda*={res.lambda_star:.6g}"
    rows = [{"method": method, **r} for r in res.table]
    where = out_dir(args)
    write_table(os.path.join(where, "cv.csv"), rows, CV_COLUMNS)
    write_report(os.path.join(where, "cv.json"),
                 {"method": method, "k_star": res.k_star, "gamma_star": res.gamma_star,
                  "lambda_star": res.lambda_star, "split": split, "seed": seed})
    print(f"{method}: {chosen}; wrote {os.path.join(where, 'cv.csv')}")
    return EXIT_OK


# parser

def _positive_int(text):
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return v


def _positive_float(text):
    v = float(text)
    if not v > 0 or math.isnan(v):
        raise argparse.ArgumentTypeError(f"expected a positive number, got {text}")
    return v


def build_parser():
    parser = argparse.ArgumentParser(
        prog="exactsparse", description="Exact sparse classification by outer approximation.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="INI file with a section per command")
        p.add_argument("--seed", type=int)
        p.add_argument("--workers", type=_positive_int)
        p.add_argument("--out", help="output directory")
        p.add_argument("--record-time", action="store_true",
                       help="include wall-clock times (outputs then differ run to run)")

    g = sub.add_parser("gen", help="generate a synthetic dataset")
    common(g)
    g.add_argument("--n", type=_positive_int)
    g.add_argument("--p", type=_positive_int)
    g.add_argument("--k-true", dest="k_true", type=int)
    g.add_argument("--rho", type=float)
    g.add_argument("--snr", type=_positive_float)
    g.add_argument("--label-model", choices=["logistic", "sign"])
    g.add_argument("--truth-model", choices=["pm1", "binary"])
    g.add_argument("--sigma2", type=float)
    g.set_defaults(func=cmd_gen)

    def data_args(p):
        p.add_argument("--data", help="dataset CSV (features then 'label')")
        p.add_argument("--standardize", action="store_true",
                       help="center and scale feature columns after loading")
        p.add_argument("--method", choices=sorted(METHODS))

    f = sub.add_parser("fit", help="fit one model on a dataset")
    common(f)
    data_args(f)
    f.add_argument("--k", type=_positive_int)
    f.add_argument("--gamma", type=_positive_float)
    f.add_argument("--lambda", dest="lam", type=float)
    f.add_argument("--tol", type=_positive_float)
    f.add_argument("--max-cuts", type=_positive_int)
    f.add_argument("--node-limit", type=_positive_int)
    f.set_defaults(func=cmd_fit)

    s = sub.add_parser("sweep", help="replicated synthetic experiment")
    common(s)
    s.add_argument("--method", help="comma-separated methods, overrides the config")
    s.add_argument("--k", type=_positive_int)
    s.add_argument("--quiet", action="store_true")
    s.set_defaults(func=cmd_sweep)

    t = sub.add_parser("theory", help="closed forms against Monte Carlo")
    common(t)
    t.add_argument("--samples", type=_positive_int)
    t.set_defaults(func=cmd_theory)

    c = sub.add_parser("cv", help="validation-set selection of k and gamma or lambda")
    common(c)
    data_args(c)
    c.add_argument("--k-grid", help="comma-separated sparsity levels")
    c.add_argument("--gamma-grid", help="comma-separated gamma values")
    c.add_argument("--split", type=float, help="training fraction (default 0.8)")
    c.set_defaults(func=cmd_cv)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, CSVParseError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as err:
        print(f"error: {err.filename or ''}: {err.strerror}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
