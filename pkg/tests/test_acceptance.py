"""Acceptance bundle: one PASS/FAIL line per criterion, at the stated tolerances."""

import math
import time

import numpy as np
import pytest

from sigapprox import assembly, blocks, harness
from sigapprox.blocks import BlockAccuracy
from sigapprox.corpus import get_function
from sigapprox.network_core import (
    SigmoidNetwork,
    affine_combination,
    compose,
    evaluate_batch,
    from_json,
    parallelize,
    to_json,
)
from sigapprox.numeric import Precision


def _line(rep):
    worst = max((c for c in rep.checks if c.asserted), key=lambda c: (not c.passed, c.measured / c.bound if c.bound else 0))
    return f"{len(rep.checks)} checks, worst '{worst.name}' = {worst.measured:.3g} vs {worst.bound}, {rep.seconds:.1f}s"


def test_c1_recursion_matches_piecewise_taylor(criterion):
    rep = harness.run_lemma_suite("L6", n=10_000)
    ok = rep.passed and rep.seconds < 30
    criterion(1, "indicator recursion equals piecewise Taylor (rel 1e-10)", ok, _line(rep))
    assert ok


@pytest.mark.parametrize("part,lemma", [("a", "L1"), ("b", "L2"), ("c", "L4"), ("d", "L8"), ("e", "L3")])
def test_c2_block_bounds(criterion, part, lemma):
    rep = harness.run_lemma_suite(lemma)
    ok = rep.passed and rep.seconds < 60
    criterion(f"2{part}", f"block bound suite {lemma}", ok, _line(rep))
    assert ok


def test_c3_partition_of_unity(criterion):
    rep = harness.run_lemma_suite("PoU")
    ok = rep.passed and rep.seconds < 5
    criterion(3, "shifted hat weights sum to 1 (1e-12)", ok, _line(rep))
    assert ok


def test_c4_architecture(criterion):
    rep = harness.run_lemma_suite("T1-arch")
    ok = rep.passed and rep.seconds < 60
    criterion(4, "depth, padded width and W0 formulas", ok, _line(rep))
    assert ok


def test_c5_weight_constant_stability(criterion):
    f = get_function("sin")
    consts = {}
    for M in range(2, 7):
        prec = Precision.extended(assembly.auto_bits(f, M))
        P = assembly.derive_params(f, M, prec)
        net = assembly.build_theorem1(f, M, prec, P)
        consts[M] = harness.weight_constant(f, M, net, P.cq)
    spread = max(consts.values()) / min(consts.values())
    ok = spread < 10
    detail = "fitted c4 " + ", ".join(f"M={m}: {c:.3g}" for m, c in consts.items()) + f"; spread {spread:.3g}"
    criterion(5, "fitted weight constant varies < 10x over M=2..6", ok, detail)
    assert ok, detail


def test_c6_boundary_suppression(criterion):
    rng = np.random.default_rng(6)
    f = get_function("sin")
    t0 = time.time()
    worst = []
    ok = True
    for M in (2, 3, 4):
        prec = Precision.extended(assembly.auto_bits(f, M))
        P = assembly.derive_params(f, M, prec)
        net = assembly.build_net_p2_true(f, P)
        X = harness.face_strip_sample(M, f.p, 1000, rng)
        Y = harness.as_float(evaluate_batch(net, X, prec))
        bound = 1 / M ** (2 * f.p + 2) + 10 * assembly.clip_tolerance(P)
        m = float(np.max(np.abs(Y)))
        worst.append(f"M={M}: {m:.3g} <= {bound:.3g}")
        ok = ok and m <= bound
    ok = ok and time.time() - t0 < 60
    criterion(6, "clipped network vanishes on face strips", ok, "; ".join(worst))
    assert ok


def test_c7_rate_law(criterion):
    t0 = time.time()
    ok = True
    parts = []
    for name, p in (("sin", 1), ("exp", 2)):
        rep = harness.run_sweep(harness.SweepSpec(name, (2, 3, 4, 5, 6)))
        assert rep.spec["p"] == p
        slope_ok = rep.slope <= -2 * p + 0.5
        # float64 builds either agree or carry an explicit flag
        dbl = harness.run_sweep(harness.SweepSpec(name, (2, 3, 4, 5, 6), precision=Precision.standard(),
                                                  grid_points_per_axis=harness.EXTENDED_GRID[1]))
        dual_ok = True
        for ext, flt in zip(rep.per_M, dbl.per_M):
            agree = (flt["sup_error"] is not None and math.isfinite(flt["sup_error"])
                     and abs(flt["sup_error"] - ext["sup_error"]) <= 1e-6 * abs(ext["sup_error"]))
            flagged = any(s.startswith(("float64 resolution", "build failed", "non-finite")) for s in flt["flags"])
            dual_ok = dual_ok and (agree or flagged)
        ok = ok and slope_ok and dual_ok
        parts.append(f"{name}: slope {rep.slope:.3f} (<= {-2 * p + 0.5}), float64 {'agrees/flagged' if dual_ok else 'unflagged mismatch'}")
    ok = ok and time.time() - t0 < 600
    criterion(7, "log-log slope of sup error <= -2p + 0.5", ok, "; ".join(parts) + f"; {time.time() - t0:.0f}s")
    assert ok


def _random_net(rng, d, widths, out=1):
    layers = []
    prev = d
    for k in list(widths) + [out]:
        layers.append(rng.normal(0, 1, (k, prev + 1)))
        prev = k
    return SigmoidNetwork(d, widths, layers)


def test_c8_network_algebra(criterion):
    rng = np.random.default_rng(8)
    t0 = time.time()
    worst = {"compose": 0.0, "parallel": 0.0, "affine": 0.0}
    for _ in range(1000):
        d = int(rng.integers(1, 4))
        L = int(rng.integers(1, 4))
        X = rng.uniform(-2, 2, (5, d))
        inner = _random_net(rng, d, rng.integers(1, 5, L), out=2)
        outer = _random_net(rng, 2, rng.integers(1, 5, int(rng.integers(1, 3))))
        two_pass = evaluate_batch(outer, evaluate_batch(inner, X))
        worst["compose"] = max(worst["compose"], float(np.max(np.abs(evaluate_batch(compose(outer, inner), X) - two_pass))))
        a = _random_net(rng, d, rng.integers(1, 5, L))
        b = _random_net(rng, d, rng.integers(1, 5, L))
        ya, yb = evaluate_batch(a, X), evaluate_batch(b, X)
        P = evaluate_batch(parallelize([a, b]), X)
        worst["parallel"] = max(worst["parallel"], float(np.max(np.abs(P - np.stack([ya, yb], axis=1)))))
        c = rng.normal(size=2)
        bias = float(rng.normal())
        A = evaluate_batch(affine_combination([a, b], c, bias), X)
        worst["affine"] = max(worst["affine"], float(np.max(np.abs(A - (c[0] * ya + c[1] * yb + bias)))))
    ok = worst["compose"] <= 1e-9 and worst["parallel"] <= 1e-12 and worst["affine"] <= 1e-12 and time.time() - t0 < 10
    criterion(8, "compose / parallelize / affine_combination", ok, ", ".join(f"{k} {v:.2g}" for k, v in worst.items()))
    assert ok


def test_c9_serialization(criterion):
    std = Precision.standard()
    f = get_function("sin")
    P = assembly.derive_params(f, 3, std)
    nets = [
        blocks.build_identity(BlockAccuracy(1.0, R=100.0), prec=std),
        blocks.build_mult(BlockAccuracy(1.0, R=100.0), prec=std),
        blocks.build_relu(BlockAccuracy(1.0, R=100.0), prec=std),
        blocks.build_monomial((1, 1), 2, BlockAccuracy(1.0, R=1e7), prec=std),
        blocks.build_polynomial({(0,): 0.5, (1,): -1.0}, 1, BlockAccuracy(1.0, R=1e5), prec=std),
        blocks.build_indicator([-0.5, -0.5], [0.5, 0.25], 1e-3, 0.05, prec=std),
        blocks.build_test(1, 0.5, 1e-3, 0.05, 2.0, prec=std),
        assembly.build_w_net(P),
        assembly.build_check_net(f, P),
        assembly.build_theorem1(f, 3, std, P),
    ]
    t0 = time.time()
    rng = np.random.default_rng(9)
    same = 0
    for net in nets:
        X = rng.uniform(-1, 1, (64, net.input_dim))
        back = from_json(to_json(net))
        same += bool(np.array_equal(evaluate_batch(net, X, std), evaluate_batch(back, X, std), equal_nan=True))
    ok = same == len(nets) and time.time() - t0 < 10
    criterion(9, "save -> load -> evaluate is bit-identical", ok, f"{same}/{len(nets)} networks")
    assert ok
