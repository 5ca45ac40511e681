import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sigapprox.corpus import get_function
from sigapprox.partition import GridPartition
from sigapprox.taylor_oracle import cq_norm, phi_recursion, piecewise_taylor, taylor_poly


def test_taylor_at_expansion_point():
    f = get_function("sin", q=3)
    assert taylor_poly(f, 3, [0.2], [0.2])[0] == pytest.approx(np.sin(0.2), abs=1e-15)


@pytest.mark.parametrize("name,d", [("square", 1), ("cubic", 1), ("square", 2), ("linear", 2)])
def test_taylor_exact_for_polynomials(name, d):
    f = get_function(name, d=d, q=3)
    rng = np.random.default_rng(1)
    X0, X = rng.uniform(-1, 1, (200, d)), rng.uniform(-1, 1, (200, d))
    np.testing.assert_allclose(taylor_poly(f, 3, X0, X), f(X), atol=1e-12)


def test_piecewise_taylor_at_corner():
    f = get_function("exp")
    fine = GridPartition(1.0, 3, 1, "fine")
    corners = fine.lefts()
    np.testing.assert_allclose(piecewise_taylor(f, fine, corners), f(corners), rtol=1e-15)


@settings(max_examples=20, deadline=None)
@given(st.integers(2, 5), st.integers(1, 2), st.integers(0, 2), st.integers(0, 2**31))
def test_recursion_equals_piecewise_taylor(M, d, q, seed):
    f = get_function("sin", d=d, q=q)
    coarse = GridPartition(1.0, M, d)
    fine = coarse.with_level("fine")
    X = np.random.default_rng(seed).uniform(-1, 1, (300, d))
    st_ = phi_recursion(f, coarse, fine, X)
    np.testing.assert_allclose(st_.phi_1_3, piecewise_taylor(f, fine, X), rtol=1e-10, atol=1e-12)


def test_piecewise_error_decays_like_rate():
    f = get_function("sin")
    errs = []
    for M in (2, 4, 8):
        X = np.linspace(-1, 1, 20001, endpoint=False)
        errs.append(np.max(np.abs(piecewise_taylor(f, GridPartition(1.0, M, 1, "fine"), X) - f(X))))
    assert errs[1] / errs[0] < 0.3 and errs[2] / errs[1] < 0.3


def test_cq_norm_known_values():
    assert cq_norm(get_function("linear"), 1.0) == pytest.approx(1.0)
    assert cq_norm(get_function("sin", q=1), 1.0) == pytest.approx(1.0)
