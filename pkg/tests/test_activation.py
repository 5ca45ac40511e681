import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from sigapprox import activation as act


def test_scanned_norms_match_closed_forms():
    assert act.norm_d2() == pytest.approx(act.NORM_D2_EXACT, rel=1e-9)
    assert act.norm_d3() == pytest.approx(act.NORM_D3_EXACT, rel=1e-9)
    # |sigma''| peaks at the operating point of the product block
    assert act.sigma_norms()["d2_argmax"] == pytest.approx(abs(act.T_MULT_EXACT), abs=1e-4)
    assert abs(act.sigmoid_d2(act.T_MULT_EXACT)) == pytest.approx(act.NORM_D2_EXACT, rel=1e-12)


def test_sigmoid_basics():
    assert act.sigmoid(0.0) == 0.5
    assert act.sigmoid(-800.0) == 0.0
    assert act.sigmoid(800.0) == 1.0


@given(st.floats(-30, 30))
def test_symmetry(x):
    assert act.sigmoid(x) + act.sigmoid(-x) == pytest.approx(1.0, abs=1e-15)


@pytest.mark.parametrize("lower,upper", [(act.sigmoid, act.sigmoid_d1), (act.sigmoid_d1, act.sigmoid_d2),
                                         (act.sigmoid_d2, act.sigmoid_d3), (act.sigmoid_d3, act.sigmoid_d4)])
def test_derivatives_match_finite_differences(lower, upper):
    x = np.linspace(-8, 8, 401)
    h = 1e-5
    fd = (lower(x + h) - lower(x - h)) / (2 * h)
    assert np.max(np.abs(fd - upper(x))) < 1e-8
