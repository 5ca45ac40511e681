import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from sigapprox import assembly
from sigapprox.corpus import get_function
from sigapprox.network_core import (
    ClassDescriptor,
    check_class_membership,
    evaluate_batch,
    evaluate_tap,
    measured_class,
    uniform_weight_count,
    weight_count,
)
from sigapprox.numeric import Precision
from sigapprox.partition import GridPartition, bspline_weight, distance_to_faces
from sigapprox.taylor_oracle import phi_recursion, piecewise_taylor


def auto(f, M):
    return Precision.extended(assembly.auto_bits(f, M))


def test_formula_values():
    assert assembly.depth_partition(1, 0) == 8
    assert assembly.depth_net_p2(0) == 5
    assert assembly.width_full(1, 0, 4) == 122
    assert assembly.depth_partition(2, 3) == 10


@given(st.integers(2, 8))
def test_partition_width_closed_form_d1_q0(M):
    assert assembly.width_partition(1, 0, M) == 12 * M + 13


def test_weight_count_scaling():
    # W0 grows like M^{2d}; the lower-order terms of r = 24M + 26 fade slowly
    W0 = {M: uniform_weight_count(1, 8, assembly.width_full(1, 0, M)) for M in (4, 8, 16, 32, 64)}
    ratios = [W0[2 * M] / W0[M] for M in (4, 8, 16, 32)]
    assert ratios == sorted(ratios)
    assert abs(ratios[1] / 4 - 1) < 0.2 and abs(ratios[-1] / 4 - 1) < 0.1


def test_parameter_values():
    f = get_function("linear")  # a = 1, max{a, cq} = 1
    P = assembly.derive_params(f, 2, Precision.extended(128))
    assert P.p == 2
    P = assembly.derive_params(get_function("sin"), 2, Precision.extended(128))
    assert float(P.B_M) == 64
    assert float(P.B_M_eps) == 128
    assert float(P.B_true) == pytest.approx(16 * math.exp(32) + 1, rel=1e-15)
    assert any(s.startswith("M < 3") for s in P.flags)


def test_envelope_and_overflow():
    with pytest.raises(assembly.EnvelopeError):
        assembly.derive_params(get_function("sin", d=3), 2)
    with pytest.raises(assembly.EnvelopeError):
        assembly.derive_params(get_function("sin"), 9)
    with pytest.raises(OverflowError, match="overflows float64"):
        assembly.derive_params(get_function("gauss", d=2), 3, Precision.standard())


def test_float64_build_is_flagged():
    P = assembly.derive_params(get_function("sin"), 3, Precision.standard())
    assert any(s.startswith("float64 resolution") for s in P.flags)


def test_full_network_architecture_d1_q0_M4():
    f = get_function("sin")
    P = assembly.derive_params(f, 4, Precision.extended(128))
    net = assembly.build_theorem1(f, 4, P.precision, P)
    rec = assembly.architecture_record(net, 1, 0, 4)
    assert rec["L"] == 8 and rec["r_formula"] == 122 and rec["max_width"] <= 122
    assert rec["W0"] == rec["W0_formula"] == weight_count(net, pad_to=122)
    cls = measured_class(net)
    assert check_class_membership(net, ClassDescriptor(8, 122, cls.weight_bound))
    assert not check_class_membership(net, ClassDescriptor(8, 122, cls.weight_bound / 1e6))


@pytest.mark.parametrize("d,q,M", [(1, 0, 3), (1, 1, 2), (2, 0, 2)])
def test_stage_taps_follow_recursion(d, q, M):
    f = get_function("sin", d=d, q=q)
    prec = auto(f, M)
    P = assembly.derive_params(f, M, prec)
    net = assembly.build_net_p2(f, P)
    fine = GridPartition(1.0, M, d, "fine")
    X = np.random.default_rng(0).uniform(-1, 1, (400 if d == 1 else 60, d))
    X = X[distance_to_faces(fine, X) > 0.05 / M**2][:40]
    ref = phi_recursion(f, GridPartition(1.0, M, d), fine, X)
    corner = np.array([evaluate_tap(net, f"phi_2_2[{j}]", X, prec) for j in range(d)], dtype=float).T
    np.testing.assert_allclose(corner, ref.phi_2_2, atol=1e-6)
    out = evaluate_batch(net, X, prec).astype(float)
    np.testing.assert_allclose(out, piecewise_taylor(f, fine, X), atol=1e-4)


def test_check_and_clipped_nets_d1():
    f = get_function("sin")
    M = 3
    prec = auto(f, M)
    P = assembly.derive_params(f, M, prec)
    G = np.linspace(-1, 1, 600, endpoint=False).reshape(-1, 1)
    fine = GridPartition(1.0, M, 1, "fine")
    dist = distance_to_faces(fine, G)
    m = 1 / M ** (2 * f.p + 2)
    chk = evaluate_batch(assembly.build_check_net(f, P), G, prec).astype(float)
    assert np.all((chk >= 0) & (chk <= 1))
    assert np.max(chk[dist >= 2 * m]) <= m
    true = evaluate_batch(assembly.build_net_p2_true(f, P), G, prec).astype(float)
    deep = dist >= 2 * m
    assert np.max(np.abs(true - f(G))[deep]) <= 10 / M ** (2 * f.p)
    w = evaluate_batch(assembly.build_w_net(P), G, prec).astype(float)
    centers = fine.lefts() + fine.side / 2
    wc = evaluate_batch(assembly.build_w_net(P), centers, prec).astype(float)
    np.testing.assert_allclose(wc, bspline_weight(fine, centers), atol=1e-3)
    assert np.max(np.abs(w)) <= 4


def test_zero_function_stays_near_zero():
    f = get_function("zero")
    M = 3
    prec = auto(f, M)
    P = assembly.derive_params(f, M, prec)
    G = np.linspace(-1, 1, 300, endpoint=False).reshape(-1, 1)
    Y = evaluate_batch(assembly.build_net_p2_true(f, P), G, prec).astype(float)
    assert np.max(np.abs(Y)) <= 1 / M ** (2 * f.p + 2) + assembly.clip_tolerance(P)


def test_square_at_point():
    f = get_function("square")
    prec = auto(f, 4)
    net = assembly.build_theorem1(f, 4, prec)
    y = float(evaluate_batch(net, [[0.3]], prec)[0])
    assert abs(y - 0.09) <= 0.09
    assert net.meta["certified_region"]
