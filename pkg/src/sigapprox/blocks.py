"""Primitive sigmoid blocks: identity, product, ReLU surrogate, monomials and
polynomials, cube indicators and the gated test block.

Each block exists at two levels.  The ``*_units`` functions wire the block
into a ``Circuit`` on top of existing signals (this is how larger networks
are assembled without melting).  The ``build_*`` functions wrap a single
block into a standalone ``SigmoidNetwork`` whose meta block records R, the
anchors and the explicit error bound.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import product as iproduct
from math import comb

from .activation import T_MULT_EXACT, norm_d2, norm_d3, sigmoid_d1, sigmoid_d2
from .circuit import Circuit, Sig
from .network_core import SigmoidNetwork
from .numeric import Precision, StandardArith, arith_for, default_precision


class PreconditionError(ValueError):
    """A block parameter violates the construction's precondition."""


@dataclass(frozen=True)
class AnchorPoints:
    """Operating points of the sigmoid used by the identity, product and ReLU blocks.

    t_id = 0 maximizes sigma'; t_mult sits where |sigma''| peaks, which makes
    the second difference as steep as possible.
    """

    t_id: float = 0.0
    t_mult: float = T_MULT_EXACT
    t_relu_gate: float = 0.0

    def __post_init__(self):
        if sigmoid_d1(self.t_id) == 0:
            raise ValueError("sigma'(t_id) must be nonzero")
        if sigmoid_d2(self.t_mult) == 0:
            raise ValueError("sigma''(t_mult) must be nonzero")


DEFAULT_ANCHORS = AnchorPoints()


@dataclass(frozen=True)
class BlockAccuracy:
    """Input half-width plus either an explicit R or a target error to derive R from."""

    a_range: float
    R: float | None = None
    target_error: float | None = None

    def __post_init__(self):
        if not self.a_range > 0:
            raise ValueError("a_range must be positive")
        if self.R is None and self.target_error is None:
            raise ValueError("give R or target_error")
        if self.R is not None and not self.R >= 1:
            raise PreconditionError(f"R = {self.R} < 1")
        if self.target_error is not None and not self.target_error > 0:
            raise ValueError("target_error must be positive")

    def resolve(self, bound_per_unit_R, R_min=1.0):
        """R to build with: explicit R (checked against R_min) or bound/target clamped to R_min."""
        R_min = max(R_min, 1.0)
        if self.R is not None:
            if self.R < R_min * (1 - 1e-12):
                raise PreconditionError(f"R = {self.R} below the required minimum {R_min}")
            return self.R
        return max(bound_per_unit_R / self.target_error, R_min)


# --------------------------------------------------------------------------- bounds


def identity_error_bound(a, R, anchors: AnchorPoints = DEFAULT_ANCHORS):
    return norm_d2() * a * a / (2 * abs(sigmoid_d1(anchors.t_id)) * R)


def identity_R_for(A, err, iterations=1, anchors: AnchorPoints = DEFAULT_ANCHORS):
    """R making each of ``iterations`` identity applications err at most err/iterations on [-A, A]."""
    return max(norm_d2() * A * A * iterations / (2 * abs(sigmoid_d1(anchors.t_id)) * err), 1)


def mult_error_bound(a, R):
    return 75 * norm_d3() * a**3 / R


def relu_error_bound(a, R):
    return 208 * max(norm_d2(), norm_d3(), 1.0) * a**3 / R


def relu_R_min(a):
    return max(2 * norm_d2() * a, 1.0)


def monomial_R_min(N, a):
    return max(75 * norm_d3() * 4 ** (3 * (N + 1)) * a ** (3 * (N + 1)), 1)


def monomial_error_bound(N, a, R):
    return 150 * norm_d3() * N * 4 ** (5 * N + 3) * a ** (5 * N + 3) / R


def polynomial_error_bound(d, N, rbar, a, R):
    return comb(d + N, d) * rbar * monomial_error_bound(N, a, R)


def tree_depth(n_factors: int) -> int:
    """Levels of a balanced pairwise product tree over n factors."""
    return max(math.ceil(math.log2(n_factors)), 0) if n_factors > 1 else 0


# --------------------------------------------------------------------------- multi-indices


def multi_indices(d: int, N: int) -> list[tuple[int, ...]]:
    """All exponent vectors of total degree <= N, graded, lexicographically decreasing within a degree."""
    out = []
    for deg in range(N + 1):
        level = [e for e in iproduct(range(deg + 1), repeat=d) if sum(e) == deg]
        out.extend(sorted(level, reverse=True))
    return out


# --------------------------------------------------------------------------- circuit primitives


class _Consts:
    """Anchor values evaluated in the circuit's arithmetic."""

    def __init__(self, ar, anchors: AnchorPoints):
        self.ar = ar
        t = ar.num(anchors.t_id)
        s = ar.sigmoid(t)
        self.t_id = t
        self.s_id = s
        self.d1_id = s * (1 - s)
        tm = ar.num(anchors.t_mult)
        sm = ar.sigmoid(tm)
        self.t_mult = tm
        self.d2_mult = sm * (1 - sm) * (1 - 2 * sm)
        self.t_gate = ar.num(anchors.t_relu_gate)


def _consts(c: Circuit, anchors: AnchorPoints) -> _Consts:
    key = ("_consts", anchors)
    cache = c.__dict__.setdefault("_const_cache", {})
    if key not in cache:
        cache[key] = _Consts(c.ar, anchors)
    return cache[key]


def identity_unit(c: Circuit, x: Sig, R, anchors: AnchorPoints = DEFAULT_ANCHORS) -> Sig:
    """(sigma(x/R + t) - sigma(t)) R / sigma'(t): one unit, output one layer later."""
    k = _consts(c, anchors)
    R = c.ar.num(R)
    h = c.neuron(x * (1 / R) + k.t_id)
    return (h - k.s_id) * (R / k.d1_id)


def identity_chain(c: Circuit, x: Sig, t: int, R, anchors: AnchorPoints = DEFAULT_ANCHORS) -> Sig:
    for _ in range(t):
        x = identity_unit(c, x, R, anchors)
    return x


def mult_unit(c: Circuit, x: Sig, y: Sig, R, anchors: AnchorPoints = DEFAULT_ANCHORS) -> Sig:
    """xy = ((x+y)^2 - (x-y)^2)/4 with each square from a symmetric second difference of sigma.

    The constant -2 sigma(t) terms of the two second differences cancel, so
    the output bias is zero and the block maps (0, 0) to exactly 0.
    """
    k = _consts(c, anchors)
    R = c.ar.num(R)
    if isinstance(x, Sig) and not isinstance(y, Sig):
        y = Sig(x.layer, {}, c.ar.num(y))
    if isinstance(y, Sig) and not isinstance(x, Sig):
        x = Sig(y.layer, {}, c.ar.num(x))
    inv = 1 / R
    u = (x + y) * inv
    v = (x - y) * inv
    h1 = c.neuron(u + k.t_mult)
    h2 = c.neuron(-u + k.t_mult)
    h3 = c.neuron(v + k.t_mult)
    h4 = c.neuron(-v + k.t_mult)
    scale = R * R / (4 * k.d2_mult)
    return (h1 + h2 - h3 - h4) * scale


def relu_unit(c: Circuit, x: Sig, R, anchors: AnchorPoints = DEFAULT_ANCHORS) -> Sig:
    """max(x, 0) as the product of a near-identity and the gate sigma(R x); two layers."""
    k = _consts(c, anchors)
    R = c.ar.num(R)
    ident = identity_unit(c, x, R, anchors)
    gate = c.neuron(x * R + k.t_gate)
    return mult_unit(c, ident, gate, R, anchors)


def product_tree(c: Circuit, factors: list[Sig], R, anchors: AnchorPoints = DEFAULT_ANCHORS) -> Sig:
    """Balanced pairwise product over factors padded with 1s to a power of two."""
    factors = list(factors)
    if len(factors) == 1:
        return factors[0]
    layer = factors[0].layer
    n = 2 ** tree_depth(len(factors))
    while len(factors) < n:
        factors.append(c.const(layer, 1))
    while len(factors) > 1:
        factors = [mult_unit(c, factors[i], factors[i + 1], R, anchors) for i in range(0, len(factors), 2)]
    return factors[0]


def monomial_units(c: Circuit, x: list[Sig], y: Sig, exponents, N: int, R, anchors=DEFAULT_ANCHORS) -> Sig:
    """y * prod_k x_k^{e_k} via a product tree of depth ceil(log2(N+1))."""
    if sum(exponents) > N:
        raise ValueError(f"exponent sum {sum(exponents)} exceeds N = {N}")
    factors = [y]
    for xk, e in zip(x, exponents):
        factors.extend([xk] * int(e))
    layer = y.layer
    n = 2 ** tree_depth(N + 1) if N > 0 else 1
    while len(factors) < n:
        factors.append(c.const(layer, 1))
    return product_tree(c, factors, R, anchors)


def polynomial_units(c: Circuit, x: list[Sig], ys: list[Sig], coeffs: dict, N: int, R, anchors=DEFAULT_ANCHORS) -> Sig:
    """sum_i r_i y_i m_i(x) over all monomials of degree <= N (graded order)."""
    idx = multi_indices(len(x), N)
    unknown = set(map(tuple, coeffs)) - set(idx)
    if unknown:
        raise ValueError(f"unknown multi-indices {sorted(unknown)}")
    if len(ys) != len(idx):
        raise ValueError(f"need {len(idx)} y inputs, got {len(ys)}")
    out = None
    for e, y in zip(idx, ys):
        r = coeffs.get(e, 0)
        term = monomial_units(c, x, y, e, N, R, anchors) * c.ar.num(r)
        out = term if out is None else out + term
    return out


def indicator_gains(ar, d: int, eps, delta):
    """(B1, B2) of the indicator block in arithmetic ``ar``."""
    B1 = 8 * ar.log(1 / ar.num(eps) - 1)
    B2 = ar.log(ar.num(4 * d - 1)) / ar.num(delta)
    return B1, B2


def indicator_units(c: Circuit, x: list[Sig], lo, hi, eps, delta) -> Sig:
    """sigma(-B1 (sum_i [sigma(B2(lo_i - x_i)) + sigma(B2(x_i - hi_i))] - 5/8)).

    B2 = ln(4d - 1)/delta keeps every inner unit below 1/(4d) on the inner
    box, so the sum stays below 1/2 there and exceeds 3/4 once a single
    coordinate leaves the cube by delta.  B1 = 8 ln(1/eps - 1) turns the
    1/8 margin into error eps.  For d = 1 this is B2 = ln(3)/delta with
    threshold 5d/8.

    ``lo``/``hi`` entries may be numbers or signals on the layer of x.
    """
    ar = c.ar
    d = len(x)
    if not 0 < eps < 1:
        raise ValueError("eps must lie in (0, 1)")
    if not delta > 0:
        raise ValueError("delta must be positive")
    for lo_i, hi_i in zip(lo, hi):
        if not isinstance(lo_i, Sig) and not isinstance(hi_i, Sig) and hi_i - lo_i < 2 * delta * (1 - 1e-12):
            raise PreconditionError("cube side below 2*delta")
    eps = ar.num(eps)
    B1, B2 = indicator_gains(ar, d, eps, delta)
    acc = None
    for xi, lo_i, hi_i in zip(x, lo, hi):
        u1 = c.neuron((-xi + lo_i) * B2)
        u2 = c.neuron((xi - hi_i) * B2)
        acc = u1 + u2 if acc is None else acc + u1 + u2
    return c.neuron((acc - ar.num(5) / 8) * (-B1))


def test_R_values(s_bound, eps):
    """(R, R_id, R_mult, eps_ind) used by the gated test block for |s| <= s_bound."""
    R = max(s_bound, 1)
    R_id = max(12 * norm_d2() * R * R / (abs(sigmoid_d1(0.0)) * eps), 1)
    R_mult = max(1800 * norm_d3() * R**3 / eps, 1)
    return R, R_id, R_mult, eps / (3 * R)


def test_units(c: Circuit, x: list[Sig], lo, side, s: Sig, eps, delta, s_bound, anchors=DEFAULT_ANCHORS) -> Sig:
    """s * 1[lo, lo + side)(x) as f_mult(f_id^2(s), f_ind(x)); three layers, width 2 + 2d."""
    ar = c.ar
    R, R_id, R_mult, eps_ind = test_R_values(ar.num(s_bound), ar.num(eps))
    hi = [lo_i + side for lo_i in lo]
    ind = indicator_units(c, x, lo, hi, eps_ind, delta)
    sid = identity_chain(c, s, 2, R_id, anchors)
    return mult_unit(c, sid, ind, R_mult, anchors)


# --------------------------------------------------------------------------- standalone builders


def _ctx(prec):
    prec = default_precision() if prec is None else prec
    return arith_for(prec)


def build_identity(acc: BlockAccuracy, anchors: AnchorPoints = DEFAULT_ANCHORS, prec: Precision | None = None, iterations: int = 1) -> SigmoidNetwork:
    """One sigmoid unit per application; |f_id(x) - x| <= ||sigma''|| a^2 / (2|sigma'(t)| R) on [-a, a]."""
    a = acc.a_range
    R = acc.resolve(identity_error_bound(a, 1.0, anchors) * iterations)
    ar = _ctx(prec)
    with ar.active():
        c = Circuit(1, ar)
        out = identity_chain(c, c.input(0), iterations, R, anchors)
        return c.compile(out, "identity", {
            "R": float(R), "a": a, "iterations": iterations, "t_id": anchors.t_id,
            "target_error": acc.target_error, "error_bound": identity_error_bound(a, R, anchors),
        })


def build_mult(acc: BlockAccuracy, anchors: AnchorPoints = DEFAULT_ANCHORS, prec: Precision | None = None) -> SigmoidNetwork:
    """Four units, inputs (x, y); |f_mult(x, y) - xy| <= 75 ||sigma'''|| a^3 / R on [-a, a]^2."""
    a = acc.a_range
    R = acc.resolve(mult_error_bound(a, 1.0))
    ar = _ctx(prec)
    with ar.active():
        c = Circuit(2, ar)
        x, y = c.inputs()
        out = mult_unit(c, x, y, R, anchors)
        return c.compile(out, "mult", {
            "R": float(R), "a": a, "t_mult": anchors.t_mult, "target_error": acc.target_error,
            "error_bound": mult_error_bound(a, R), "lemma_alpha": 3 * float(R) ** 2,
        })


def build_relu(acc: BlockAccuracy, anchors: AnchorPoints = DEFAULT_ANCHORS, prec: Precision | None = None) -> SigmoidNetwork:
    """Two layers (widths 2 and 4); error <= 208 max{||s''||, ||s'''||, 1} a^3 / R on [-a, a]."""
    a = acc.a_range
    if a < 1:
        raise PreconditionError("the ReLU block needs a >= 1")
    R = acc.resolve(relu_error_bound(a, 1.0), relu_R_min(a))
    ar = _ctx(prec)
    with ar.active():
        c = Circuit(1, ar)
        out = relu_unit(c, c.input(0), R, anchors)
        return c.compile(out, "relu", {
            "R": float(R), "a": a, "t_relu_gate": anchors.t_relu_gate, "target_error": acc.target_error,
            "error_bound": relu_error_bound(a, R),
        })


def build_monomial(exponents, N: int, acc: BlockAccuracy, anchors: AnchorPoints = DEFAULT_ANCHORS, prec: Precision | None = None) -> SigmoidNetwork:
    """Inputs (x_1..x_d, y); computes y * prod x_k^{e_k} with ceil(log2(N+1)) layers."""
    exponents = tuple(int(e) for e in exponents)
    if sum(exponents) > N:
        raise ValueError(f"exponent sum {sum(exponents)} exceeds N = {N}")
    if N < 1:
        raise ValueError("N >= 1 needed for at least one hidden layer")
    a = acc.a_range
    if a < 1:
        raise PreconditionError("the monomial block needs a >= 1")
    R = acc.resolve(monomial_error_bound(N, a, 1.0), monomial_R_min(N, a))
    d = len(exponents)
    ar = _ctx(prec)
    with ar.active():
        c = Circuit(d + 1, ar)
        ins = c.inputs()
        out = monomial_units(c, ins[:d], ins[d], exponents, N, R, anchors)
        return c.compile(out, "monomial", {
            "exponents": list(exponents), "N": N, "R": float(R), "a": a,
            "target_error": acc.target_error, "error_bound": monomial_error_bound(N, a, R),
        })


def build_polynomial(coeffs: dict, N: int, acc: BlockAccuracy, d: int | None = None, anchors: AnchorPoints = DEFAULT_ANCHORS, prec: Precision | None = None) -> SigmoidNetwork:
    """Inputs (x_1..x_d, y_1..y_B) with B = binom(d+N, d); output sum r_i y_i m_i(x)."""
    coeffs = {tuple(int(v) for v in k): v for k, v in coeffs.items()}
    if d is None:
        if not coeffs:
            raise ValueError("d is needed for an empty coefficient map")
        d = len(next(iter(coeffs)))
    if N < 1:
        raise ValueError("N >= 1 needed for at least one hidden layer")
    a = acc.a_range
    if a < 1:
        raise PreconditionError("the polynomial block needs a >= 1")
    rbar = max([abs(float(v)) for v in coeffs.values()] or [0.0])
    R = acc.resolve(polynomial_error_bound(d, N, max(rbar, 1e-300), a, 1.0), monomial_R_min(N, a))
    B = comb(d + N, d)
    ar = _ctx(prec)
    with ar.active():
        c = Circuit(d + B, ar)
        ins = c.inputs()
        out = polynomial_units(c, ins[:d], ins[d:], coeffs, N, R, anchors)
        return c.compile(out, "polynomial", {
            "coeffs": {",".join(map(str, k)): float(v) for k, v in coeffs.items()}, "N": N, "d": d,
            "R": float(R), "a": a, "target_error": acc.target_error,
            "error_bound": polynomial_error_bound(d, N, rbar, a, R),
            "lemma_alpha": 9 * max(rbar, 1.0) * float(R) ** 4,
        })


def build_indicator(cube_low, cube_high, eps: float, delta: float, prec: Precision | None = None) -> SigmoidNetwork:
    """Two layers (2d units, then one); within eps of the cube indicator away from its faces."""
    lo = [float(v) for v in cube_low]
    hi = [float(v) for v in cube_high]
    if len(lo) != len(hi):
        raise ValueError("cube corners differ in dimension")
    for l_, h_ in zip(lo, hi):
        if h_ - l_ < 2 * delta:
            raise PreconditionError("cube side below 2*delta")
    d = len(lo)
    ar = _ctx(prec)
    with ar.active():
        c = Circuit(d, ar)
        out = indicator_units(c, c.inputs(), [ar.num(v) for v in lo], [ar.num(v) for v in hi], eps, delta)
        B1, B2 = (float(v) for v in indicator_gains(StandardArith(), d, eps, delta))
        return c.compile(out, "indicator", {
            "low": lo, "high": hi, "eps": eps, "delta": delta, "B1": B1, "B2": B2,
            "lemma_alpha": max(B1, B2, max(abs(v) for v in lo + hi) * B2),
        })


def build_test(d: int, side_length: float, eps: float, delta: float, s_bound: float, anchors: AnchorPoints = DEFAULT_ANCHORS, prec: Precision | None = None) -> SigmoidNetwork:
    """Inputs (x, lo, s) of size 2d+1; approximates s * 1[lo, lo + side)(x) for |s| <= s_bound."""
    if side_length < 2 * delta:
        raise PreconditionError("side length below 2*delta")
    ar = _ctx(prec)
    with ar.active():
        c = Circuit(2 * d + 1, ar)
        ins = c.inputs()
        out = test_units(c, ins[:d], ins[d : 2 * d], ar.num(side_length), ins[2 * d], eps, delta, s_bound, anchors)
        R, R_id, R_mult, eps_ind = test_R_values(s_bound, eps)
        return c.compile(out, "test", {
            "d": d, "side": side_length, "eps": eps, "delta": delta, "s_bound": s_bound,
            "R_id": R_id, "R_mult": R_mult, "eps_ind": eps_ind,
        })
