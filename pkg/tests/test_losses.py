import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from exactsparse.losses import (
    Loss,
    as_loss,
    conjugate_derivative,
    conjugate_interval,
    conjugate_value,
    loss_value,
)

KINDS = list(Loss)
labels = st.sampled_from([-1.0, 1.0])
margins = st.floats(-30, 30, allow_nan=False)


def feasible_alpha(kind, y, t):
    """Map t in [0, 1] into the conjugate domain for label y."""
    if kind is Loss.SQUARED_HINGE:
        return -y * 5.0 * t
    return -y * t


def test_loss_examples():
    assert loss_value("logistic", 1, 0) == pytest.approx(math.log(2))
    assert loss_value("hinge", 1, 1) == 0.0
    assert loss_value("squared_hinge", -1, 0.5) == pytest.approx(1.125)


def test_conjugate_examples():
    assert conjugate_value("logistic", 1, 0.0) == 0.0
    assert conjugate_value("logistic", 1, -1.0) == 0.0
    assert conjugate_value("hinge", 1, -1.0) == -1.0
    assert conjugate_value("logistic", 1, -0.5) == pytest.approx(-0.6931471805599453, abs=1e-12)


def test_conjugate_intervals():
    assert conjugate_interval("hinge", 1) == (-1.0, 0.0)
    assert conjugate_interval("hinge", -1) == (0.0, 1.0)
    assert conjugate_interval("logistic", -1) == (0.0, 1.0)
    assert conjugate_interval("squared_hinge", 1) == (-math.inf, 0.0)
    assert conjugate_interval("squared_hinge", -1) == (0.0, math.inf)


@pytest.mark.parametrize("kind", KINDS)
def test_infeasible_alpha_is_infinite(kind):
    assert conjugate_value(kind, 1, 0.5) == math.inf
    assert conjugate_value(kind, -1, -0.5) == math.inf


def test_nonfinite_margin_rejected():
    with pytest.raises(ValueError):
        loss_value("logistic", 1, np.inf)


def test_unknown_kind():
    with pytest.raises(ValueError, match="unknown loss"):
        as_loss("squared")


def test_vectorized():
    y = np.array([1.0, -1.0, 1.0])
    u = np.array([0.0, 2.0, -1.0])
    np.testing.assert_allclose(loss_value("hinge", y, u), [1.0, 3.0, 2.0])


@pytest.mark.parametrize("kind", KINDS)
@given(y=labels, u=margins, t=st.floats(0, 1))
def test_fenchel_young(kind, y, u, t):
    a = feasible_alpha(kind, y, t)
    assert loss_value(kind, y, u) + conjugate_value(kind, y, a) >= u * a - 1e-12


@pytest.mark.parametrize("kind", [Loss.LOGISTIC, Loss.SQUARED_HINGE])
@given(y=labels, u=st.floats(-8, 8))
def test_fenchel_young_equality_at_derivative(kind, y, u):
    # the sup over u of (u a - l) is attained where a = l'(u)
    from exactsparse.losses import loss_derivative
    a = loss_derivative(kind, y, u)
    gap = loss_value(kind, y, u) + conjugate_value(kind, y, a) - u * a
    assert abs(gap) <= 1e-9 * (1 + abs(u))


@pytest.mark.parametrize("kind,tol", [(Loss.LOGISTIC, 1e-6), (Loss.SQUARED_HINGE, 1e-6),
                                      (Loss.HINGE, 2e-4)])
def test_biconjugate(kind, tol):
    for y in (-1.0, 1.0):
        if kind is Loss.SQUARED_HINGE:
            t = np.linspace(0, 12, 1_200_001)
        else:
            t = np.linspace(0, 1, 1_000_001)
        a = -y * t
        conj = conjugate_value(kind, y, a)
        for u in np.linspace(-5, 5, 41):
            bi = np.max(u * a - conj)
            assert bi == pytest.approx(loss_value(kind, y, u), abs=tol)


@pytest.mark.parametrize("kind", KINDS)
@given(y=labels, t1=st.floats(0, 1), t2=st.floats(0, 1))
def test_conjugate_midpoint_convex(kind, y, t1, t2):
    a1, a2 = feasible_alpha(kind, y, t1), feasible_alpha(kind, y, t2)
    mid = conjugate_value(kind, y, 0.5 * (a1 + a2))
    avg = 0.5 * (conjugate_value(kind, y, a1) + conjugate_value(kind, y, a2))
    assert mid <= avg + 1e-12


@pytest.mark.parametrize("kind", [Loss.LOGISTIC, Loss.SQUARED_HINGE])
def test_conjugate_derivative_matches_finite_difference(kind):
    for y in (-1.0, 1.0):
        for t in (0.2, 0.5, 0.8):
            a = -y * t
            h = 1e-6
            fd = (conjugate_value(kind, y, a + h) - conjugate_value(kind, y, a - h)) / (2 * h)
            assert conjugate_derivative(kind, y, a) == pytest.approx(fd, rel=1e-5, abs=1e-8)
