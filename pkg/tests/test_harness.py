import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sigapprox import assembly, harness
from sigapprox.corpus import get_function
from sigapprox.network_core import affine_combination
from sigapprox.numeric import Precision


def test_sweep_spec_validation():
    with pytest.raises(ValueError):
        harness.SweepSpec("sin", (3, 2))
    with pytest.raises(ValueError):
        harness.SweepSpec("sin", ())
    with pytest.raises(ValueError):
        harness.SweepSpec("sin", (2, 3), region="everywhere")
    assert harness.SweepSpec("exp", (2,)).p == 2


def test_grid_excludes_right_end():
    X = harness.uniform_grid(-1, 1, 10, 2)
    assert X.shape == (100, 2) and X.max() < 1 and X.min() == -1
    G = harness.SweepSpec("sin", (3,), grid_points_per_axis=50).grid(3)
    assert G.min() >= -0.5 and G.max() < 0.5


def test_unknown_lemma_id():
    with pytest.raises(KeyError):
        harness.run_lemma_suite("L99")


@given(st.floats(-3, -1), st.floats(-2, 2))
def test_fit_rate_recovers_power_law(slope, logc):
    Ms = [2, 3, 4, 5, 6]
    s, c = harness.fit_rate(Ms, [math.exp(logc) * m**slope for m in Ms])
    assert s == pytest.approx(slope, abs=1e-9) and c == pytest.approx(logc, abs=1e-9)


def test_fit_rate_skips_missing():
    s, _ = harness.fit_rate([2, 3, 4], [None, float("nan"), 1.0])
    assert math.isnan(s)


def test_report_round_trips():
    rep = harness.RateReport(
        {"function_name": "sin", "p": 1.0}, [
            {"M": 2, "sup_error": 0.1, "L": 8, "r": 74, "W0": 3, "max_weight": 1e5, "flags": ["a", "b"]},
            {"M": 3, "sup_error": None, "L": None, "r": None, "W0": None, "max_weight": None, "flags": []},
        ], -2.0, 0.5, 1.6)
    assert harness.RateReport.from_json(rep.to_json()) == rep
    assert harness.RateReport.from_csv(rep.to_csv()) == rep


def test_self_comparison_error_is_zero():
    f = get_function("sin")
    prec = Precision.extended(256)
    P = assembly.derive_params(f, 3, prec)
    net = assembly.build_w_net(P)
    same = affine_combination([net, net], [1.0, -1.0])
    X = harness.uniform_grid(-1, 1, 200, 1)
    # weights reach 1e23, so float64 would leave rounding residue; 256 bits does not
    assert np.max(np.abs(harness.as_float(harness.evaluate_parallel(same, X, prec)))) <= 1e-40


def test_parallel_evaluation_matches_serial():
    f = get_function("sin")
    prec = Precision.extended(assembly.auto_bits(f, 2))
    net = assembly.build_theorem1(f, 2, prec)
    X = harness.uniform_grid(-0.5, 0.5, 40, 1)
    a = harness.evaluate_parallel(net, X, prec, workers=1, chunk=16)
    b = harness.evaluate_parallel(net, X, prec, workers=2, chunk=16)
    assert all(u == v for u, v in zip(a, b))


@settings(max_examples=5, deadline=None)
@given(st.integers(20, 120))
def test_grid_refinement_never_lowers_the_sup(n):
    f = get_function("sin")
    prec = Precision.extended(assembly.auto_bits(f, 3))
    net = assembly.build_theorem1(f, 3, prec)
    coarse = harness.SweepSpec("sin", (3,), grid_points_per_axis=n, face_samples=False)
    fine = harness.SweepSpec("sin", (3,), grid_points_per_axis=2 * n, face_samples=False)
    assert harness.sup_error(net, f, fine, 3, prec) >= harness.sup_error(net, f, coarse, 3, prec)


def test_small_sweep_reports_architecture():
    rep = harness.run_sweep(harness.SweepSpec("linear", (2, 3, 4), grid_points_per_axis=200))
    for row in rep.per_M:
        assert row["L"] == 9 and row["r"] == assembly.width_full(1, 1, row["M"])
        assert row["W0"] == uniform_count(row["L"], row["r"])
    assert rep.slope <= -2 * rep.spec["p"] + 0.5


def uniform_count(L, r):
    return 2 * r + (L - 1) * r * (r + 1) + r + 1


@pytest.mark.parametrize("lemma", ["L1", "L2", "L8", "PoU"])
def test_fast_suites_pass(lemma):
    assert harness.run_lemma_suite(lemma).passed


@pytest.mark.slow
@pytest.mark.parametrize("lemma", ["L9", "L10", "L11", "L12"])
def test_assembly_suites_pass(lemma):
    rep = harness.run_lemma_suite(lemma, M_values=(3,))
    assert rep.passed, [c for c in rep.checks if not c.passed]


def test_sigma_norm_report():
    rep = harness.sigma_norm_report()
    assert rep["sup|sigma'''|"] == pytest.approx(0.125)
