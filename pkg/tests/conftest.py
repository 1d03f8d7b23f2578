import itertools

import numpy as np
import pytest

from exactsparse.dataset import Dataset
from exactsparse.dual import evaluate_support


def random_dataset(n, p, seed, signal=2, label="logistic"):
    """Small correlated instance with a planted sparse signal."""
    rng = np.random.default_rng(seed)
    X = rng.standard_normal((n, p))
    w = np.zeros(p)
    w[rng.choice(p, size=min(signal, p), replace=False)] = rng.choice([-1.0, 1.0], size=min(signal, p))
    m = X @ w
    if label == "logistic":
        y = np.where(rng.random(n) < 1 / (1 + np.exp(-m)), 1.0, -1.0)
    else:
        y = np.where(m > 0, 1.0, -1.0)
    if y.min() == y.max():
        y[0] = -y[0]
    return Dataset(X, y)


def enumerate_c(data, k, gamma, kind, exact_size=False):
    """Brute-force ``min c(s)`` over supports of size <= k (or == k)."""
    best = (np.inf, None)
    sizes = [k] if exact_size else range(1, k + 1)
    for size in sizes:
        for idx in itertools.combinations(range(data.p), size):
            s = np.zeros(data.p)
            s[list(idx)] = 1.0
            c = evaluate_support(data, s, gamma, kind).objective
            if c < best[0]:
                best = (c, s)
    return best


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


# acceptance verdicts, printed once at the end of the session
VERDICTS = {}


def record_criterion(number, title, ok, detail):
    VERDICTS[number] = (title, bool(ok), detail)
    return bool(ok)


def pytest_terminal_summary(terminalreporter):
    if not VERDICTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(VERDICTS):
        title, ok, detail = VERDICTS[number]
        terminalreporter.write_line(
            f"criterion {number:2d} {'PASS' if ok else 'FAIL'}  {title}: {detail}")
