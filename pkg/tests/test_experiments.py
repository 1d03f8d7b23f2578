import pytest

from exactsparse.experiments import SweepConfig, parse_method, run_one, run_sweep, summarize
from exactsparse.losses import Loss


def small(**kw):
    base = dict(n_grid=(60,), p=12, k_true=3, seeds=2, n_val=50, lasso_grid=10,
                max_cuts=30, node_limit=2000)
    return SweepConfig(**{**base, **kw})


def test_parse_method():
    assert parse_method("sparse-svm") == ("sparse", Loss.HINGE)
    with pytest.raises(ValueError):
        parse_method("ridge")


def test_config_validation():
    with pytest.raises(ValueError):
        small(seeds=0)
    with pytest.raises(ValueError):
        small(methods=("ridge",))
    with pytest.raises(ValueError):
        small(cv=True)


def test_sweep_rows_and_order():
    cfg = small(methods=("sparse-logistic", "lasso-logistic"))
    rows = run_sweep(cfg)
    assert [(r["seed"], r["method"]) for r in rows] == [
        (0, "sparse-logistic"), (0, "lasso-logistic"),
        (1, "sparse-logistic"), (1, "lasso-logistic")]
    for r in rows:
        assert "error" not in r
        assert r["A"] + r["F"] == r["support_size"]
        assert "wall_time" not in r
    for r in rows[::2]:
        assert r["support_size"] == 3
    for r in rows[1::2]:
        assert r["support_size"] <= 3
    agg = summarize(rows)
    assert [a["count"] for a in agg] == [2, 2]


def test_sparse_svm_and_cv_rows():
    cfg = small(seeds=1, methods=("sparse-svm", "lasso-svm"), label_model="sign")
    for r in run_sweep(cfg):
        assert "error" not in r
    cfg = small(seeds=1, cv=True, k_grid=(2, 3, 4), record_time=True)
    rows = run_sweep(cfg)
    assert rows[0]["k_star"] in (2, 3, 4)
    assert rows[0]["support_size"] == rows[0]["k_star"]
    assert all(r["wall_time"] > 0 for r in rows)


def test_errors_are_recorded():
    row = run_one(small(k=20), 60, 0, "sparse-logistic")
    assert "error" in row
