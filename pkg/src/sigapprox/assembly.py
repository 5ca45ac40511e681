"""Assembly of the full approximating network from blocks.

Pipeline per (shifted) partition:

* corner network: x -> piecewise Taylor value, via coarse indicators (layers
  1-2), offset tests selecting the fine corner (layers 3-5) and a polynomial
  block (remaining layers);
* hat network: the tensor-product hat of the fine cube containing x;
* check network: close to 1 within 1/M^{2p+2} of a fine face, close to 0
  deeper inside;
* clipped network: the corner network forced to 0 where the check fires.
  It embeds the depth-5 form of the check (bare indicators instead of gated
  tests), which keeps every layer within the width budget for all q;
* partition network: hat times clipped value.

The final network sums the partition networks over all 2^d shifts.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from math import comb
from typing import Any

import numpy as np

from . import blocks
from .activation import norm_d2, norm_d3, sigmoid_d1
from .blocks import (
    DEFAULT_ANCHORS,
    AnchorPoints,
    identity_chain,
    identity_R_for,
    indicator_units,
    monomial_R_min,
    mult_unit,
    multi_indices,
    polynomial_units,
    product_tree,
    relu_unit,
    test_units,
)
from .circuit import Circuit, Sig
from .network_core import SigmoidNetwork, affine_combination, weight_count
from .numeric import ExtendedArith, Precision, arith_for, default_precision, log2_abs
from .taylor_oracle import SmoothFunction, cq_norm

MAX_DIM = 2
MAX_M = 8


class EnvelopeError(ValueError):
    """Build request outside the supported (d, M) envelope."""


def clog2(n: int) -> int:
    return math.ceil(math.log2(n)) if n > 1 else 0


# --------------------------------------------------------------------------- formulas


def depth_net_p2(q: int) -> int:
    return 5 + clog2(q + 1)


def depth_w(d: int) -> int:
    return 7 + clog2(d)


def depth_check() -> int:
    return 6


def depth_net_true(q: int) -> int:
    return 7 + clog2(q + 1)


def depth_partition(d: int, q: int) -> int:
    return 8 + clog2(max(d, q + 1))


def width_net_p2(d: int, q: int, M: int) -> int:
    B = comb(d + q, d)
    return max((B + d) * M**d * (2 + 2 * d) + d, 4 * (q + 1) * B)


def width_w(d: int, M: int) -> int:
    return max(12 * d, 2 * d + M**d * d * (2 + 2 * d))


def width_check(d: int, M: int) -> int:
    return (2 * d + 2) * d * M**d + d


def width_net_true(d: int, q: int, M: int) -> int:
    return width_net_p2(d, q, M) + M**d * (2 * d + 2)


def width_partition(d: int, q: int, M: int) -> int:
    return width_net_p2(d, q, M) + M**d * (2 * d + 2) + 12 * d


def width_full(d: int, q: int, M: int) -> int:
    return 2**d * width_partition(d, q, M)


def log_alpha_full(d: int, p: float, M: int, a: float, cq: float, c4: float = 1.0) -> float:
    """Natural log of c4 max{a, cq}^12 exp(6 * 2^{2(d+1)+1} a d) M^{10p+2d+10}."""
    return math.log(c4) + 12 * math.log(max(a, cq)) + 6 * 2 ** (2 * (d + 1) + 1) * a * d + (10 * p + 2 * d + 10) * math.log(M)


# --------------------------------------------------------------------------- parameters


@dataclass
class BuildParams:
    """Resolved construction scalars for one (f, M) pair.

    Scalars are held in the build arithmetic (float or mpfr); ``summary``
    gives a JSON-friendly view.
    """

    name: str
    d: int
    q: int
    s: float
    C: float
    a: float
    M: int
    cq: float
    sup_f: float
    B_M: Any
    B_M_id: Any
    B_M_eps: Any
    B_M_p: Any
    B_true: Any
    B_M_eps_check: Any
    precision: Precision
    anchors: AnchorPoints = DEFAULT_ANCHORS
    R: dict = field(default_factory=dict)
    flags: list = field(default_factory=list)

    @property
    def p(self) -> float:
        return self.q + self.s

    def summary(self) -> dict:
        def enc(v):
            if isinstance(v, float):
                return v
            try:
                f = float(v)
                if math.isfinite(f):
                    return f
            except (OverflowError, TypeError):
                pass
            return f"2^{log2_abs(v):.3f}"

        return {
            "function": self.name, "d": self.d, "q": self.q, "s": self.s, "p": self.p, "C": self.C,
            "a": self.a, "M": self.M, "cq_norm": self.cq, "sup_f": self.sup_f,
            "B_M": enc(self.B_M), "B_M_id": enc(self.B_M_id), "B_M_eps": enc(self.B_M_eps),
            "B_M_p": enc(self.B_M_p), "B_true": enc(self.B_true), "B_M_eps_check": enc(self.B_M_eps_check),
            "R": {k: enc(v) for k, v in self.R.items()}, "precision": self.precision.label(),
            "flags": list(self.flags),
        }

    def max_log2_R(self) -> float:
        return max(log2_abs(v) for v in self.R.values())


def _raw_params(f: SmoothFunction, M: int, ar) -> dict:
    """Every construction scalar computed in the arithmetic ``ar`` (inside its context)."""
    d, q, a = f.d, f.q, f.a
    p = f.q + f.s
    cq = cq_norm(f, a)
    sup_f = cq_norm(f, a, q=0)
    mx = max(a, cq)
    n = ar.num
    Mn = n(M)
    d1 = sigmoid_d1(0.0)
    nd2, nd3 = n(norm_d2()), n(norm_d3())
    relu_c = n(208 * max(norm_d2(), norm_d3(), 1.0))

    P = {}
    P["B_M"] = 4 * Mn ** (2 * p + 2)
    P["B_M_id"] = 12 * Mn ** (2 * p + 2)
    P["B_M_eps"] = 4 * n(mx) * Mn ** (2 * p + 2 + d)
    P["B_M_p"] = Mn ** (2 * p)
    P["B_true"] = n(2) ** (2 * (d + 1)) * ar.exp(n(2) ** (2 * (d + 1) + 1) * n(a) * d) * n(max(cq, 1.0)) + 1
    P["B_M_eps_check"] = 4 * n(mx) * Mn ** (2 * p + 2 + 2 * d)

    R = {}
    base_id = P["B_M_id"] * nd2 * 2 * n(a) ** 2 / n(d1)
    R["id_x"] = base_id * max(2 - 1, 1)
    R["id_x3"] = base_id * (3 - 1)
    s_bound = 2 * n(mx)
    Rt, R_id, R_mult, _ = blocks.test_R_values(s_bound, 1 / P["B_M_eps"])
    R["test_id"] = R_id
    R["test_mult"] = R_mult
    a_p = n(2) ** (2 * (d + 1)) * max(2 * n(a), n(cq))
    R["poly"] = max(P["B_M_p"], monomial_R_min(q, a_p)) if q > 0 else P["B_M_p"]
    A_w = n(2) ** (2 * (d + 1) + 1) * n(a) * Mn**2
    R["relu_w"] = max(n(2) ** (6 * (d + 1)) * n(a) ** 3 * Mn ** (2 * p + 6) * relu_c, blocks.relu_R_min(A_w))
    R["prod_w"] = max(P["B_M_p"], monomial_R_min(d - 1, 2)) if d > 1 else P["B_M_p"]
    _, Rc_id, Rc_mult, _ = blocks.test_R_values(n(1), 1 / P["B_M_eps_check"])
    R["check_test_id"] = Rc_id
    R["check_test_mult"] = Rc_mult
    R["check_id"] = identity_R_for(2 * Mn**d, 1 / (2 * Mn ** (2 * p + 2 + d)), 3)
    R["check_B1"] = 4 * ar.log(Mn ** (2 * p + 2) - 1)
    R["clip_B1"] = 4 * ar.log(3 * Mn ** (2 * p + 2) * P["B_true"] - 1)
    R["clip_id"] = identity_R_for(n(2), 1 / (3 * Mn ** (2 * p + 2) * P["B_true"]), max(clog2(q + 1), 1))
    R["relu_clip"] = relu_c * (4 * P["B_true"]) ** 3 * 3 * Mn ** (2 * p + 2)
    sf = n(max(sup_f, 1.0))
    R["part_mult"] = 75 * nd3 * n(2) ** (3 * (d + 1)) * sf**3 * Mn ** (2 * p)
    t_sync = abs(clog2(q + 1) - clog2(d))
    R["part_id"] = identity_R_for(n(2) ** (d + 1) * sf, 1 / Mn ** (2 * p), max(t_sync, 1))
    P["R"] = R
    P["cq"], P["sup_f"] = cq, sup_f
    return P


def derive_params(f: SmoothFunction, M: int, prec: Precision | None = None, anchors: AnchorPoints = DEFAULT_ANCHORS) -> BuildParams:
    """Evaluate every construction scalar for (f, M) in the requested precision.

    Size conditions on M are checked and reported as flags, never enforced.
    Values that overflow float64 raise OverflowError naming the parameter.
    """
    if f.d > MAX_DIM:
        raise EnvelopeError(f"d = {f.d} is outside the supported envelope d <= {MAX_DIM}")
    if M > MAX_M:
        raise EnvelopeError(f"M = {M} is outside the supported envelope M <= {MAX_M}")
    if M < 2:
        raise ValueError("M >= 2 required")
    if f.a < 1:
        raise ValueError("the construction needs a >= 1")
    prec = default_precision() if prec is None else prec
    ar = arith_for(prec)
    try:
        with ar.active():
            P = _raw_params(f, M, ar)
    except OverflowError:
        if prec.is_extended:
            raise
        raise OverflowError(_first_overflow(f, M)) from None
    if not prec.is_extended:
        for k in ("B_M", "B_M_id", "B_M_eps", "B_M_p", "B_true", "B_M_eps_check"):
            if not math.isfinite(P[k]):
                raise OverflowError(f"{k} overflows float64; request extended precision")
        for k, v in P["R"].items():
            if not math.isfinite(v) or not math.isfinite(float(v) ** 2):
                raise OverflowError(f"R[{k}] (or its square) overflows float64; request extended precision")
    p = f.q + f.s
    flags = ["c2 unknown: accuracy-side size conditions use fitted constants"]
    if not prec.is_extended:
        worst = max(P["R"], key=lambda k: P["R"][k])
        if P["R"][worst] ** 2 * 2.0**-53 > 1e-6:
            flags.append(f"float64 resolution: R[{worst}]^2 * 2^-53 > 1e-6, products lose all accuracy")
    if M**(2 * p) < max(2**f.d, 12 * f.d):
        flags.append(f"M^(2p) = {M ** (2 * p):g} < max(2^d, 12d) = {max(2 ** f.d, 12 * f.d)}")
    if M < 3:
        flags.append("M < 3: clipping stage below its stated size")
    return BuildParams(
        f.name, f.d, f.q, f.s, f.C, f.a, M, P["cq"], P["sup_f"],
        P["B_M"], P["B_M_id"], P["B_M_eps"], P["B_M_p"], P["B_true"], P["B_M_eps_check"],
        prec, anchors, P["R"], flags,
    )


def _first_overflow(f: SmoothFunction, M: int) -> str:
    """Name the first scalar whose value leaves the float64 range."""
    ar = ExtendedArith(128)
    with ar.active():
        P = _raw_params(f, M, ar)
    items = [(k, P[k]) for k in ("B_M", "B_M_id", "B_M_eps", "B_M_p", "B_true", "B_M_eps_check")]
    items += [(f"R[{k}]", v) for k, v in P["R"].items()]
    for k, v in items:
        if log2_abs(v) >= 1024:
            return f"{k} = 2^{log2_abs(v):.1f} overflows float64; request extended precision"
    return "a construction scalar overflows float64; request extended precision"


def auto_bits(f: SmoothFunction, M: int, headroom: int = 128) -> int:
    """Bits so that the largest second-difference scale R^2 is resolved with headroom to spare."""
    params = derive_params(f, M, Precision.extended(128))
    bits = int(2 * params.max_log2_R()) + headroom
    return max(128, 64 * math.ceil(bits / 64))


# --------------------------------------------------------------------------- circuit-level stages


class _Ctx:
    """Per-build view: params in the build arithmetic, partition geometry and the target."""

    def __init__(self, f: SmoothFunction | None, params: BuildParams, shift_mask, ar):
        self.f = f
        self.P = params
        self.ar = ar
        d, M, a = params.d, params.M, params.a
        self.d, self.M, self.q = d, M, params.q
        mask = tuple(int(m) for m in (shift_mask or (0,) * d))
        if len(mask) != d:
            raise ValueError("shift mask must have d entries")
        self.mask = mask
        n = ar.num
        self.h = n(a) / M**2  # shift
        self.side1 = 2 * n(a) / M
        self.side2 = 2 * n(a) / M**2
        grid = np.array(list(np.ndindex(*([M] * d))), dtype=np.int64)
        shift = [self.h * m for m in mask]
        self.lefts = [[-n(a) + shift[j] + int(g[j]) * self.side1 for j in range(d)] for g in grid]
        self.offsets = [[int(g[j]) * self.side2 for j in range(d)] for g in grid]
        self.ells = multi_indices(d, params.q)
        self.margin = 1 / (n(M) ** (2 * params.p + 2))  # strip width 1/M^{2p+2}
        self.anchors = params.anchors

    def num(self, v):
        return self.ar.num(v)

    def R(self, key):
        return self.ar.num(self.P.R[key])


def _stage1(c: Circuit, x: list[Sig], g: _Ctx, with_phi31: bool, with_shrunk: bool) -> dict:
    """Layers 1-2: f_id^2(x), coarse indicators and the derived corner sums."""
    P = g.P
    out: dict = {}
    out["phi_1_1"] = [identity_chain(c, xi, 2, g.R("id_x"), g.anchors) for xi in x]
    eps = 1 / g.num(P.B_M_eps)
    delta = 1 / g.num(P.B_M)
    inds = []
    for left in g.lefts:
        hi = [l_ + g.side1 for l_ in left]
        inds.append(indicator_units(c, x, left, hi, eps, delta))
    out["coarse_ind"] = inds
    d = g.d
    phi21 = []
    for j in range(d):
        acc = c.const(2, 0)
        for left, ind in zip(g.lefts, inds):
            acc = acc + ind * left[j]
        phi21.append(acc)
    out["phi_2_1"] = phi21
    if with_phi31:
        phi31 = {}
        corners_f = np.array([[float(v) for v in left] for left in g.lefts])
        for si, off in enumerate(g.offsets):
            pts = corners_f + np.array([float(v) for v in off])
            for li, ell in enumerate(g.ells):
                vals = g.f.derivative(ell, pts)
                acc = c.const(2, 0)
                for val, ind in zip(vals, inds):
                    if val != 0:
                        acc = acc + ind * g.num(float(val))
                phi31[(li, si)] = acc
        out["phi_3_1"] = phi31
    if with_shrunk:
        m = g.margin * g.num(5) / 4
        eps_c = 1 / g.num(P.B_M_eps_check)
        delta_c = g.margin / 4
        shrunk = []
        for left in g.lefts:
            lo = [l_ + m for l_ in left]
            hi = [l_ + g.side1 - m for l_ in left]
            shrunk.append(indicator_units(c, x, lo, hi, eps_c, delta_c))
        f1 = c.const(2, 1)
        for s_ in shrunk:
            f1 = f1 - s_
        out["f_hat_1"] = f1
    return out


def _stage2(c: Circuit, st: dict, g: _Ctx, with_phi32: bool) -> dict:
    """Layers 3-5: f_id^3 shift of x and offset tests picking the fine corner and its derivatives."""
    P = g.P
    out: dict = {}
    out["phi_1_2"] = [identity_chain(c, v, 3, g.R("id_x3"), g.anchors) for v in st["phi_1_1"]]
    eps = 1 / g.num(P.B_M_eps)
    delta = 1 / g.num(P.B_M)
    s_bound = 2 * g.num(max(P.a, P.cq))
    phi11, phi21 = st["phi_1_1"], st["phi_2_1"]
    d = g.d
    phi22 = [c.const(5, 0) for _ in range(d)]
    phi32 = {li: c.const(5, 0) for li in range(len(g.ells))} if with_phi32 else None
    for si, off in enumerate(g.offsets):
        lo = [phi21[j] + off[j] for j in range(d)]
        for t in range(d):
            s_sig = phi21[t] + off[t]
            phi22[t] = phi22[t] + test_units(c, phi11, lo, g.side2, s_sig, eps, delta, s_bound, g.anchors)
        if with_phi32:
            for li in range(len(g.ells)):
                s_sig = st["phi_3_1"][(li, si)]
                phi32[li] = phi32[li] + test_units(c, phi11, lo, g.side2, s_sig, eps, delta, s_bound, g.anchors)
    out["phi_2_2"] = phi22
    out["phi_3_2"] = phi32
    return out


def _stage3(c: Circuit, s2: dict, g: _Ctx) -> Sig:
    """Taylor polynomial sum_l y_l z^l / l! with z = phi_1_2 - phi_2_2 and y_l = phi_3_2[l]."""
    z = [s2["phi_1_2"][j] - s2["phi_2_2"][j] for j in range(g.d)]
    ys = [s2["phi_3_2"][li] for li in range(len(g.ells))]
    if g.q == 0:
        return ys[0]
    coeffs = {ell: 1 / g.num(math.prod(math.factorial(e) for e in ell)) for ell in g.ells}
    return polynomial_units(c, z, ys, coeffs, g.q, g.R("poly"), g.anchors)


def _hat_units(c: Circuit, s2: dict, g: _Ctx) -> Sig:
    """Tensor hat from three ReLUs per coordinate, then a product tree over the d factors."""
    M2a = g.num(g.M) ** 2 / g.num(g.P.a)
    R = g.R("relu_w")
    hats = []
    for j in range(g.d):
        z = s2["phi_1_2"][j] - s2["phi_2_2"][j]
        u = z * M2a
        r1 = relu_unit(c, u, R, g.anchors)
        r2 = relu_unit(c, u - 1, R, g.anchors)
        r3 = relu_unit(c, u - 2, R, g.anchors)
        hats.append(r1 - r2 * 2 + r3)
    if g.d == 1:
        return hats[0]
    return product_tree(c, hats, g.R("prod_w"), g.anchors)


def _check_units(c: Circuit, st: dict, g: _Ctx, B1, compact: bool) -> Sig:
    """Strip detector: sigma(-B1 (1/2 - f2 - M^d f_id^t(f1))).

    The full form (depth 6) tests shrunken fine cubes with s = 1; the compact
    form (depth 5) uses bare indicators instead of the gated tests.
    """
    P = g.P
    m = g.margin * g.num(5) / 4
    side = g.side2 - 2 * m
    eps_c = 1 / g.num(P.B_M_eps_check)
    delta_c = g.margin / 4
    phi11, phi21 = st["phi_1_1"], st["phi_2_1"]
    d = g.d
    top = 4 if compact else 5
    f2 = c.const(top, 1)
    for off in g.offsets:
        lo = [phi21[j] + off[j] + m for j in range(d)]
        if compact:
            hi = [l_ + side for l_ in lo]
            f2 = f2 - indicator_units(c, phi11, lo, hi, eps_c, delta_c)
        else:
            one = c.const(2, 1)
            f2 = f2 - test_units(c, phi11, lo, side, one, eps_c, delta_c, 1, g.anchors)
    t = 2 if compact else 3
    gsig = identity_chain(c, st["f_hat_1"], t, g.R("check_id"), g.anchors)
    c.tap("f_hat_2", f2)
    c.tap("f_hat_1_shifted", gsig)
    B2 = g.num(g.M) ** d
    return c.neuron((f2 * (-1) + g.num(0.5) - gsig * B2) * (-B1))


def _clip_units(c: Circuit, net: Sig, chk: Sig, g: _Ctx) -> Sig:
    """ReLU(net - 2 B chk') - ReLU(-net - 2 B chk') with chk' carried to the layer of net."""
    t = net.layer - chk.layer
    if t < 0:
        raise AssertionError("check deeper than the corner network")
    chk2 = identity_chain(c, chk, t, g.R("clip_id"), g.anchors)
    c.tap("check_synced", chk2)
    B2 = 2 * g.num(g.P.B_true)
    R = g.R("relu_clip")
    return relu_unit(c, net - chk2 * B2, R, g.anchors) - relu_unit(c, -net - chk2 * B2, R, g.anchors)


def _tap_stage(c: Circuit, st: dict, s2: dict | None = None):
    for j, v in enumerate(st["phi_1_1"]):
        c.tap(f"phi_1_1[{j}]", v)
    for j, v in enumerate(st["phi_2_1"]):
        c.tap(f"phi_2_1[{j}]", v)
    if "f_hat_1" in st:
        c.tap("f_hat_1", st["f_hat_1"])
    for (li, si), v in st.get("phi_3_1", {}).items():
        c.tap(f"phi_3_1[{li},{si}]", v)
    if s2:
        for j, v in enumerate(s2["phi_1_2"]):
            c.tap(f"phi_1_2[{j}]", v)
        for j, v in enumerate(s2["phi_2_2"]):
            c.tap(f"phi_2_2[{j}]", v)
        for li, v in (s2["phi_3_2"] or {}).items():
            c.tap(f"phi_3_2[{li}]", v)


def _meta(params: BuildParams, mask, extra=None) -> dict:
    m = {"build_params": params.summary(), "shift_mask": list(mask or (0,) * params.d)}
    m.update(extra or {})
    return m


def _with_ctx(params: BuildParams):
    return arith_for(params.precision)


# --------------------------------------------------------------------------- public builders


def build_net_p2(f: SmoothFunction, params: BuildParams, fine_shift=None) -> SigmoidNetwork:
    """Corner network: piecewise Taylor value of f on the (shifted) fine partition; depth 5 + ceil(log2(q+1))."""
    ar = _with_ctx(params)
    with ar.active():
        g = _Ctx(f, params, fine_shift, ar)
        c = Circuit(params.d, ar)
        st = _stage1(c, c.inputs(), g, True, False)
        s2 = _stage2(c, st, g, True)
        _tap_stage(c, st, s2)
        out = _stage3(c, s2, g)
        net = c.compile(out, "net_p2", {"M": params.M, "d": params.d, "q": params.q}, _meta(params, g.mask))
    _check_arch(net, depth_net_p2(params.q), width_net_p2(params.d, params.q, params.M), "corner network")
    return net


def build_w_net(params: BuildParams, fine_shift=None) -> SigmoidNetwork:
    """Hat-weight network of the fine cube containing x; depth 7 + ceil(log2 d)."""
    ar = _with_ctx(params)
    with ar.active():
        g = _Ctx(None, params, fine_shift, ar)
        c = Circuit(params.d, ar)
        st = _stage1(c, c.inputs(), g, False, False)
        s2 = _stage2(c, st, g, False)
        _tap_stage(c, st, s2)
        out = _hat_units(c, s2, g)
        net = c.compile(out, "w_net", {"M": params.M, "d": params.d}, _meta(params, g.mask))
    _check_arch(net, depth_w(params.d), width_w(params.d, params.M), "hat network")
    return net


def build_check_net(f: SmoothFunction | None, params: BuildParams, fine_shift=None, compact: bool = False, B1=None) -> SigmoidNetwork:
    """Strip detector; depth 6 (or 5 with ``compact``) and output in [0, 1]."""
    ar = _with_ctx(params)
    with ar.active():
        g = _Ctx(f, params, fine_shift, ar)
        c = Circuit(params.d, ar)
        st = _stage1(c, c.inputs(), g, False, True)
        _tap_stage(c, st)
        B1v = g.R("check_B1") if B1 is None else ar.num(B1)
        out = _check_units(c, st, g, B1v, compact)
        net = c.compile(out, "check_net", {"M": params.M, "d": params.d, "compact": compact}, _meta(params, g.mask))
    _check_arch(net, 5 if compact else depth_check(), width_check(params.d, params.M), "check network")
    return net


def _true_units(c: Circuit, g: _Ctx, x) -> tuple[Sig, dict, dict]:
    st = _stage1(c, x, g, True, True)
    s2 = _stage2(c, st, g, True)
    _tap_stage(c, st, s2)
    net = _stage3(c, s2, g)
    c.tap("net_p2", net)
    chk = _check_units(c, st, g, g.R("clip_B1"), compact=True)
    c.tap("check", chk)
    return _clip_units(c, net, chk, g), st, s2


def build_net_p2_true(f: SmoothFunction, params: BuildParams, fine_shift=None) -> SigmoidNetwork:
    """Corner network clipped to ~0 on the fine-face strips; depth 7 + ceil(log2(q+1))."""
    ar = _with_ctx(params)
    with ar.active():
        g = _Ctx(f, params, fine_shift, ar)
        c = Circuit(params.d, ar)
        out, _, _ = _true_units(c, g, c.inputs())
        net = c.compile(out, "net_p2_true", {"M": params.M, "d": params.d, "q": params.q}, _meta(params, g.mask))
    _check_arch(net, depth_net_true(params.q), width_net_true(params.d, params.q, params.M), "clipped network")
    return net


def build_net_partition(f: SmoothFunction, params: BuildParams, shift_mask=None) -> SigmoidNetwork:
    """Hat weight times clipped corner value for one shifted partition; depth 8 + ceil(log2 max(d, q+1))."""
    ar = _with_ctx(params)
    with ar.active():
        g = _Ctx(f, params, shift_mask, ar)
        c = Circuit(params.d, ar)
        true, st, s2 = _true_units(c, g, c.inputs())
        c.tap("net_true", true)
        w = _hat_units(c, s2, g)
        c.tap("w", w)
        L = max(true.layer, w.layer)
        Rs = g.R("part_id")
        w = identity_chain(c, w, L - w.layer, Rs, g.anchors)
        true = identity_chain(c, true, L - true.layer, Rs, g.anchors)
        out = mult_unit(c, w, true, g.R("part_mult"), g.anchors)
        net = c.compile(out, "net_partition", {"M": params.M, "d": params.d, "q": params.q}, _meta(params, g.mask))
    _check_arch(net, depth_partition(params.d, params.q), width_partition(params.d, params.q, params.M), "partition network")
    return net


def build_theorem1(f: SmoothFunction, M: int, prec: Precision | None = None, params: BuildParams | None = None) -> SigmoidNetwork:
    """Sum of the 2^d shifted partition networks; certified on [-a/2, a/2]^d."""
    if params is None:
        params = derive_params(f, M, prec)
    parts = [build_net_partition(f, params, mask) for mask in np.ndindex(*([2] * f.d))]
    net = affine_combination(parts, [1] * len(parts), 0)
    meta = dict(net.meta)
    meta.update({
        "builder": "theorem1",
        "params": {"function": f.name, "M": M, "d": f.d, "q": f.q, "p": f.p, "a": f.a},
        "build_params": params.summary(),
        "certified_region": [-f.a / 2, f.a / 2],
    })
    net = SigmoidNetwork(net.input_dim, net.widths, net.layers, meta)
    _check_arch(net, depth_partition(f.d, f.q), width_full(f.d, f.q, M), "full network")
    return net


class ArchitectureError(AssertionError):
    """A built network breaks its depth or width formula."""


def _check_arch(net: SigmoidNetwork, depth: int, width: int, what: str) -> None:
    if net.depth != depth:
        raise ArchitectureError(f"{what}: depth {net.depth} != {depth}")
    if net.max_width > width:
        raise ArchitectureError(f"{what}: width {net.max_width} exceeds {width}")


def architecture_record(net: SigmoidNetwork, d: int, q: int, M: int) -> dict:
    """Depth, formula width, padded W0 and its closed form for a full network."""
    r = width_full(d, q, M)
    L = depth_partition(d, q)
    return {
        "L": net.depth, "L_formula": L, "r_formula": r, "max_width": net.max_width,
        "W0": weight_count(net, pad_to=r),
        "W0_formula": (d + 1) * r + (L - 1) * r * (r + 1) + (r + 1),
    }


def clip_tolerance(params: BuildParams) -> float:
    """Combined bound of the two ReLU blocks in the clipped network (each within 1/(3 M^{2p+2}))."""
    ar = arith_for(params.precision)
    with ar.active():
        A = 4 * ar.num(params.B_true)
        R = ar.num(params.R["relu_clip"])
        return float(2 * blocks.relu_error_bound(A, R))
