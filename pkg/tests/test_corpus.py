import numpy as np
import pytest

from sigapprox.blocks import multi_indices
from sigapprox.corpus import NAMES, get_function
from sigapprox.taylor_oracle import holder_ratio


@pytest.mark.parametrize("name", NAMES)
@pytest.mark.parametrize("d", [1, 2])
def test_derivatives_match_finite_differences(name, d):
    f = get_function(name, d=d, q=2)
    X = np.random.default_rng(0).uniform(-0.9, 0.9, (50, d))
    h = 1e-5
    for ell in multi_indices(d, 1):
        for j in range(d):
            up = tuple(e + (i == j) for i, e in enumerate(ell))
            E = np.zeros(d)
            E[j] = h
            fd = (f.derivative(ell, X + E) - f.derivative(ell, X - E)) / (2 * h)
            np.testing.assert_allclose(fd, f.derivative(up, X), atol=1e-6)


@pytest.mark.parametrize("name", NAMES)
def test_declared_holder_constant(name):
    f = get_function(name, d=2 if name == "gauss" else 1)
    assert holder_ratio(f) <= f.C * (1 + 1e-9)


def test_unknown_name():
    with pytest.raises(KeyError):
        get_function("tan")
