import numpy as np
import pytest

from sigapprox.circuit import Circuit, LayerMismatch, Sig, lincomb
from sigapprox.network_core import evaluate
from sigapprox.numeric import StandardArith


def test_signal_arithmetic():
    a = Sig(1, {0: 2.0}, 1.0)
    b = Sig(1, {0: -1.0, 2: 3.0}, 0.5)
    s = 2 * a - b + 1
    assert s.terms == {0: 5.0, 2: -3.0}
    assert s.const == pytest.approx(2.5)
    assert (a / 4).terms == {0: 0.5}
    assert Sig(3, {}, 7).is_constant
    assert lincomb([a, b], [1, 1], 2).const == pytest.approx(3.5)


def test_layer_mismatch_and_signal_products():
    with pytest.raises(LayerMismatch):
        Sig(1, {0: 1.0}) + Sig(2, {0: 1.0})
    with pytest.raises(TypeError):
        Sig(1, {0: 1.0}) * Sig(1, {0: 1.0})


def test_compile_matches_hand_evaluation():
    c = Circuit(2, StandardArith())
    x, y = c.inputs()
    u = c.neuron(x * 2.0 - y)
    v = c.neuron(y + 0.5)
    w = c.neuron(u - v)
    net = c.compile(w * 3.0 + 1.0, "hand")
    assert net.widths == (2, 1)
    sig = lambda t: 1 / (1 + np.exp(-t))  # noqa: E731
    X = np.array([0.3, -0.8])
    want = 3 * sig(sig(2 * X[0] - X[1]) - sig(X[1] + 0.5)) + 1
    assert evaluate(net, X) == pytest.approx(want, rel=1e-15)
    assert c.width(0) == 2 and c.width(1) == 2 and c.width(2) == 1
