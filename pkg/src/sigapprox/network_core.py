"""Explicit sigmoid feedforward networks: representation, evaluation, algebra, accounting.

A network with input dimension d and hidden widths k_1..k_L stores L+1 dense
coefficient matrices.  Column 0 of every matrix is the bias.  Hidden units
apply the logistic sigmoid; the output layer is affine.  Matrices hold
float64 values (standard precision) or gmpy2.mpfr objects (extended).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import gmpy2
import numpy as np

from .numeric import (
    ExtendedArith,
    Precision,
    arith_for,
    default_precision,
    log2_abs,
    mpfr_to_json,
)

_MPFR = type(gmpy2.mpfr(0))


class DimensionError(ValueError):
    """Input vector length does not match the network's input dimension."""


class CompositionError(ValueError):
    """Arity mismatch between composed networks."""


class ParallelizationError(ValueError):
    """Networks to stack in parallel differ in depth or input dimension."""


@dataclass(frozen=True)
class ClassDescriptor:
    """The class F(L, r, alpha): depth L, width r, coefficients bounded by alpha."""

    depth: int
    width: int
    weight_bound: float

    def __post_init__(self):
        if self.depth < 1 or self.width < 1:
            raise ValueError("depth and width must be >= 1")
        if not self.weight_bound > 0:
            raise ValueError("weight bound must be positive")


@dataclass(frozen=True, eq=False)
class SigmoidNetwork:
    """Feedforward sigmoid network with dense per-layer coefficient matrices."""

    input_dim: int
    widths: tuple[int, ...]
    layers: tuple[np.ndarray, ...]
    meta: dict = field(default_factory=dict)
    taps: dict = field(default_factory=dict)
    _cache: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "widths", tuple(int(k) for k in self.widths))
        object.__setattr__(self, "layers", tuple(self.layers))
        if self.input_dim < 1:
            raise ValueError("input_dim must be positive")
        if len(self.layers) != len(self.widths) + 1:
            raise ValueError("need one coefficient matrix per hidden layer plus the output layer")
        prev = self.input_dim
        for s, k in enumerate(self.widths):
            if k < 1:
                raise ValueError("hidden widths must be positive")
            if self.layers[s].shape != (k, prev + 1):
                raise ValueError(f"layer {s} has shape {self.layers[s].shape}, expected {(k, prev + 1)}")
            prev = k
        out = self.layers[-1]
        if out.ndim != 2 or out.shape[1] != prev + 1 or out.shape[0] < 1:
            raise ValueError(f"output layer has shape {out.shape}, expected (n, {prev + 1})")

    @property
    def depth(self) -> int:
        return len(self.widths)

    @property
    def output_dim(self) -> int:
        return self.layers[-1].shape[0]

    @property
    def is_extended(self) -> bool:
        return self.layers[0].dtype == object

    @property
    def max_width(self) -> int:
        return max(self.widths) if self.widths else 0

    def nonzeros(self):
        """Per-layer (rows, cols, values) of the nonzero coefficients, cached."""
        if "nz" not in self._cache:
            nz = []
            for W in self.layers:
                if W.dtype == object:
                    mask = np.frompyfunc(lambda v: v != 0, 1, 1)(W).astype(bool)
                else:
                    mask = W != 0
                r, c = np.nonzero(mask)
                nz.append((r, c, W[r, c]))
            self._cache["nz"] = nz
        return self._cache["nz"]

    def max_abs_weight(self):
        """Largest |coefficient| (float, or mpfr for extended networks)."""
        if "maxw" not in self._cache:
            best = 0
            for W in self.layers:
                if W.dtype == object:
                    for v in W.ravel():
                        if v != 0 and abs(v) > best:
                            best = abs(v)
                else:
                    if W.size:
                        best = max(best, float(np.max(np.abs(W))))
            self._cache["maxw"] = best
        return self._cache["maxw"]

    def log10_max_weight(self) -> float:
        m = self.max_abs_weight()
        return log2_abs(m) / math.log2(10) if m != 0 else -math.inf

    def float_layers(self) -> tuple[np.ndarray, ...]:
        """Coefficients rounded to float64 (may contain inf for extended networks)."""
        if "f64" not in self._cache:
            if self.is_extended:
                with np.errstate(over="ignore"):
                    conv = tuple(np.vectorize(float, otypes=[float])(W) if W.size else W.astype(float) for W in self.layers)
            else:
                conv = self.layers
            self._cache["f64"] = conv
        return self._cache["f64"]

    def all_finite(self, prec: Precision | None = None) -> bool:
        if prec is not None and prec.is_extended:
            if not self.is_extended:
                return all(np.all(np.isfinite(W)) for W in self.layers)
            return all(gmpy2.is_finite(v) for W in self.layers for v in W.ravel() if isinstance(v, _MPFR))
        return all(np.all(np.isfinite(W)) for W in self.float_layers())


def _extended_layers(net: SigmoidNetwork, bits: int):
    key = ("ext", bits)
    if key not in net._cache:
        ar = ExtendedArith(bits)
        out = []
        with ar.active():
            for r, c, vals in net.nonzeros():
                conv = np.empty(len(vals), dtype=object)
                for i, v in enumerate(vals):
                    conv[i] = v if isinstance(v, _MPFR) and v.precision >= bits else ar.num(v)
                out.append((r, c, conv))
        net._cache[key] = out
    return net._cache[key]


def _as_points(net: SigmoidNetwork, x) -> np.ndarray:
    X = np.asarray(x, dtype=object if _has_mpfr(x) else float)
    if X.ndim == 0:
        X = X.reshape(1, 1)
    elif X.ndim == 1:
        if net.input_dim == 1 and X.shape[0] != 1:
            X = X.reshape(-1, 1)
        else:
            X = X.reshape(1, -1)
    if X.shape[1] != net.input_dim:
        raise DimensionError(f"expected {net.input_dim} inputs per point, got {X.shape[1]}")
    return X


def _has_mpfr(x) -> bool:
    if isinstance(x, _MPFR):
        return True
    if isinstance(x, np.ndarray):
        return x.dtype == object
    return False


def _forward_float(layers, X: np.ndarray) -> np.ndarray:
    H = X.T
    for W in layers[:-1]:
        Z = W[:, 1:] @ H + W[:, :1]
        H = _sigmoid_stable(Z)
    return (layers[-1][:, 1:] @ H + layers[-1][:, :1]).T


def _sigmoid_stable(Z: np.ndarray) -> np.ndarray:
    out = np.empty_like(Z)
    pos = Z >= 0
    with np.errstate(over="ignore"):
        out[pos] = 1.0 / (1.0 + np.exp(-Z[pos]))
        e = np.exp(Z[~pos])
        out[~pos] = e / (1.0 + e)
    return out


_mp_sigmoid = np.frompyfunc(lambda z: 1 / (1 + gmpy2.exp(-z)), 1, 1)


def _forward_extended(net: SigmoidNetwork, X: np.ndarray, bits: int) -> np.ndarray:
    ar = ExtendedArith(bits)
    layers = _extended_layers(net, bits)
    n = X.shape[0]
    with ar.active():
        one = ar.num(1)
        H = np.empty((net.input_dim + 1, n), dtype=object)
        H[0, :] = one
        for j in range(net.input_dim):
            H[j + 1, :] = [ar.num(v) for v in X[:, j]]
        for s, (rows, cols, vals) in enumerate(layers):
            k = net.layers[s].shape[0]
            Z = np.empty((k, n), dtype=object)
            Z[:] = 0
            order = np.argsort(rows, kind="stable")
            rows_s, cols_s, vals_s = rows[order], cols[order], vals[order]
            bounds = np.searchsorted(rows_s, np.arange(k + 1))
            for i in range(k):
                lo, hi = bounds[i], bounds[i + 1]
                if hi > lo:
                    Z[i] = np.dot(vals_s[lo:hi], H[cols_s[lo:hi]])
                else:
                    Z[i] = ar.num(0)
            if s == len(layers) - 1:
                return Z.T
            Hn = np.empty((k + 1, n), dtype=object)
            Hn[0, :] = one
            Hn[1:] = _mp_sigmoid(Z)
            H = Hn
    raise AssertionError("unreachable")


def evaluate_batch(net: SigmoidNetwork, X, prec: Precision | None = None) -> np.ndarray:
    """Forward pass for a batch of points (rows of X); returns shape (n,) or (n, output_dim)."""
    prec = default_precision() if prec is None else prec
    X = _as_points(net, X)
    if prec.is_extended:
        Y = _forward_extended(net, X, prec.bits)
    else:
        layers = net.float_layers()
        if not all(np.all(np.isfinite(W)) for W in layers):
            raise OverflowError("coefficients are not finite in float64; evaluate in extended precision")
        Y = _forward_float(layers, X.astype(float))
    return Y[:, 0] if net.output_dim == 1 else Y


def evaluate(net: SigmoidNetwork, x, prec: Precision | None = None):
    """Network output at a single point x (length input_dim)."""
    x = np.atleast_1d(np.asarray(x, dtype=object if _has_mpfr(x) else float))
    if x.ndim != 1 or x.shape[0] != net.input_dim:
        raise DimensionError(f"expected a vector of length {net.input_dim}")
    y = evaluate_batch(net, x.reshape(1, -1), prec)
    return y[0]


def evaluate_with_error_bound(net: SigmoidNetwork, X) -> tuple[np.ndarray, np.ndarray]:
    """float64 forward pass plus a first-order running bound on its rounding error.

    Each affine map contributes gamma_n * (|W||h| + |b|) plus the propagated
    input error |W| e_h; each sigmoid maps an error e to e/4 + 2u (Lipschitz 1/4).
    """
    X = _as_points(net, X).astype(float)
    layers = net.float_layers()
    if not all(np.all(np.isfinite(W)) for W in layers):
        raise OverflowError("coefficients are not finite in float64")
    u = np.finfo(float).eps / 2
    H = X.T
    E = np.zeros_like(H)
    for i, W in enumerate(layers):
        A = W[:, 1:]
        n = A.shape[1] + 1
        gamma = n * u / (1 - n * u)
        Z = A @ H + W[:, :1]
        mag = np.abs(A) @ np.abs(H) + np.abs(W[:, :1])
        EZ = np.abs(A) @ E + gamma * mag
        if i == len(layers) - 1:
            Y, EY = Z.T, EZ.T
            break
        H = _sigmoid_stable(Z)
        E = np.minimum(0.25 * EZ + 2 * u, 1.0)
    if net.output_dim == 1:
        return Y[:, 0], EY[:, 0]
    return Y, EY


def evaluate_tap(net: SigmoidNetwork, name: str, X, prec: Precision | None = None) -> np.ndarray:
    """Value of a recorded internal signal: an affine form over one hidden layer's outputs."""
    tap = net.taps[name]
    layer = tap["layer"]
    sub_widths = net.widths[:layer]
    k = net.input_dim if layer == 0 else net.widths[layer - 1]
    dtype = object if net.is_extended else float
    out = np.zeros((1, k + 1), dtype=dtype)
    out[0, 0] = tap["const"]
    for j, c in tap["terms"].items():
        out[0, j + 1] = c
    if layer == 0:
        X = _as_points(net, X)
        prec = default_precision() if prec is None else prec
        ar = arith_for(prec)
        with ar.active():
            vals = [out[0, 0] + sum(out[0, j + 1] * ar.num(X[i, j]) for j in range(k)) for i in range(X.shape[0])]
        return np.array(vals, dtype=object if prec.is_extended else float)
    sub = SigmoidNetwork(net.input_dim, sub_widths, net.layers[:layer] + (out,))
    return evaluate_batch(sub, X, prec)


# --------------------------------------------------------------------------- algebra


def _dtype_of(nets: Sequence[SigmoidNetwork]):
    return object if any(n.is_extended for n in nets) else float


def _cast(W: np.ndarray, dtype) -> np.ndarray:
    if W.dtype == dtype:
        return W
    return W.astype(dtype)


def _bound(net: SigmoidNetwork):
    b = net.meta.get("weight_bound")
    if b is None:
        return net.max_abs_weight()
    return b


def _block_diag(blocks: Sequence[np.ndarray], dtype, share_bias: bool) -> np.ndarray:
    """Stack matrices block-diagonally over their non-bias columns; bias columns stay in column 0.

    When ``share_bias`` the non-bias columns are shared instead (first layer:
    all sub-networks read the same input x).
    """
    rows = sum(B.shape[0] for B in blocks)
    if share_bias:
        cols = blocks[0].shape[1]
    else:
        cols = 1 + sum(B.shape[1] - 1 for B in blocks)
    out = np.zeros((rows, cols), dtype=dtype)
    r = 0
    c = 1
    for B in blocks:
        h = B.shape[0]
        out[r : r + h, 0] = B[:, 0]
        if share_bias:
            out[r : r + h, 1:] = B[:, 1:]
        else:
            w = B.shape[1] - 1
            out[r : r + h, c : c + w] = B[:, 1:]
            c += w
        r += h
    return out


def parallelize(nets: Sequence[SigmoidNetwork]) -> SigmoidNetwork:
    """Stack networks of equal depth on a shared input; outputs are concatenated."""
    nets = list(nets)
    if not nets:
        raise ParallelizationError("need at least one network")
    if len(nets) == 1:
        return nets[0]
    L = nets[0].depth
    d = nets[0].input_dim
    for n in nets:
        if n.depth != L:
            raise ParallelizationError("networks differ in depth; pad with identity blocks first")
        if n.input_dim != d:
            raise ParallelizationError("networks differ in input dimension")
    dtype = _dtype_of(nets)
    layers = []
    for s in range(L + 1):
        blocks = [_cast(n.layers[s], dtype) for n in nets]
        layers.append(_block_diag(blocks, dtype, share_bias=(s == 0)))
    widths = [sum(n.widths[s] for n in nets) for s in range(L)]
    bound = max(_bound(n) for n in nets)
    meta = {"builder": "parallelize", "params": {"parts": [n.meta.get("builder", "?") for n in nets]}, "weight_bound": bound}
    return SigmoidNetwork(d, widths, layers, meta)


def affine_combination(nets: Sequence[SigmoidNetwork], coeffs: Sequence, bias=0.0) -> SigmoidNetwork:
    """Network computing bias + sum_i coeffs[i] * nets[i](x) with unchanged depth."""
    nets = list(nets)
    coeffs = list(coeffs)
    if len(nets) != len(coeffs):
        raise ValueError("one coefficient per network required")
    for n in nets:
        if n.output_dim != 1:
            raise ValueError("affine_combination expects scalar-output networks")
    P = parallelize(nets) if len(nets) > 1 else nets[0]
    out = P.layers[-1]
    dtype = out.dtype
    row = np.zeros((1, out.shape[1]), dtype=dtype)
    row[0, 0] = bias
    for i, c in enumerate(coeffs):
        row[0, :] = row[0, :] + c * out[i, :]
    layers = P.layers[:-1] + (row,)
    bound = max([_bound(n) for n in nets] + [abs(float(c)) for c in coeffs if c != 0] or [0.0])
    meta = {
        "builder": "affine_combination",
        "params": {"parts": [n.meta.get("builder", "?") for n in nets], "coeffs": [float(c) for c in coeffs], "bias": float(bias)},
        "weight_bound": bound,
    }
    return SigmoidNetwork(P.input_dim, P.widths, layers, meta)


def compose(outer: SigmoidNetwork, inner) -> SigmoidNetwork:
    """Network x -> outer(inner(x)); the inner output layer is melted into outer's first layer.

    ``inner`` may be a list of equal-depth networks whose concatenated outputs
    feed ``outer``.
    """
    inners = list(inner) if isinstance(inner, (list, tuple)) else [inner]
    g = parallelize(inners) if len(inners) > 1 else inners[0]
    if g.output_dim != outer.input_dim:
        raise CompositionError(f"inner produces {g.output_dim} values, outer expects {outer.input_dim}")
    dtype = _dtype_of([outer, g])
    O = _cast(g.layers[-1], dtype)
    F = _cast(outer.layers[0], dtype)
    melted = np.zeros((F.shape[0], O.shape[1]), dtype=dtype)
    melted[:, 1:] = F[:, 1:] @ O[:, 1:]
    melted[:, 0] = F[:, 0] + F[:, 1:] @ O[:, 0]
    layers = tuple(_cast(W, dtype) for W in g.layers[:-1]) + (melted,) + tuple(_cast(W, dtype) for W in outer.layers[1:])
    widths = g.widths + outer.widths
    bf = _bound(outer)
    bg = _bound(g)
    bound = max(bf, 1) * max(bg, 1)
    meta = {
        "builder": "compose",
        "params": {"outer": outer.meta.get("builder", "?"), "inner": [n.meta.get("builder", "?") for n in inners]},
        "weight_bound": bound,
    }
    return SigmoidNetwork(g.input_dim, widths, layers, meta)


# --------------------------------------------------------------------------- accounting


def pad_to_width(net: SigmoidNetwork, r: int) -> SigmoidNetwork:
    """Zero-pad every hidden layer to exactly r units (outputs unchanged; padding recorded)."""
    if net.max_width > r:
        raise ValueError(f"network width {net.max_width} exceeds target {r}")
    dtype = net.layers[0].dtype
    layers = []
    prev_old, prev_new = net.input_dim, net.input_dim
    for s, W in enumerate(net.layers):
        rows_new = r if s < net.depth else W.shape[0]
        P = np.zeros((rows_new, prev_new + 1), dtype=dtype)
        P[: W.shape[0], : prev_old + 1] = W
        layers.append(P)
        if s < net.depth:
            prev_old, prev_new = W.shape[0], r
    meta = dict(net.meta)
    meta["padded_from"] = list(net.widths)
    return SigmoidNetwork(net.input_dim, [r] * net.depth, layers, meta, dict(net.taps))


def check_class_membership(net: SigmoidNetwork, cls: ClassDescriptor) -> bool:
    """True iff depth equals L, every hidden width is at most r, and max |c| <= alpha."""
    return membership_report(net, cls)["member"]


def membership_report(net: SigmoidNetwork, cls: ClassDescriptor) -> dict:
    depth_ok = net.depth == cls.depth
    width_ok = net.max_width <= cls.width
    m = net.max_abs_weight()
    weight_ok = bool(m <= cls.weight_bound)
    return {
        "member": bool(depth_ok and width_ok and weight_ok),
        "depth": net.depth,
        "max_width": net.max_width,
        "padding_units": [cls.width - k for k in net.widths],
        "max_weight": float(m) if math.isfinite(log2_abs(m) if m else 0.0) and log2_abs(m) < 1000 else m,
        "depth_ok": depth_ok,
        "width_ok": width_ok,
        "weight_ok": weight_ok,
    }


def measured_class(net: SigmoidNetwork) -> ClassDescriptor:
    m = net.max_abs_weight()
    return ClassDescriptor(net.depth, net.max_width, m if m > 0 else 1.0)


def weight_count(net: SigmoidNetwork, pad_to: int | None = None) -> int:
    """Number of stored coefficients including biases.

    With ``pad_to`` the count is taken over the network zero-padded to that
    uniform width, without materializing the padding.
    """
    if pad_to is None:
        return int(sum(W.size for W in net.layers))
    if net.max_width > pad_to:
        raise ValueError("pad_to is smaller than a hidden width")
    total = 0
    prev = net.input_dim
    for s, W in enumerate(net.layers):
        rows = pad_to if s < net.depth else W.shape[0]
        total += rows * (prev + 1)
        prev = pad_to
    return total


def uniform_weight_count(d: int, L: int, r: int) -> int:
    """Closed form (d+1) r + (L-1) r (r+1) + (r+1) for a uniform-width scalar network."""
    return (d + 1) * r + (L - 1) * r * (r + 1) + (r + 1)


# --------------------------------------------------------------------------- serialization


def _encode(v) -> str:
    if isinstance(v, _MPFR):
        return mpfr_to_json(v)
    if v == 0:
        return "0"
    return repr(float(v))


def _encode_meta(obj):
    if isinstance(obj, dict):
        return {str(k): _encode_meta(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_encode_meta(v) for v in obj]
    if isinstance(obj, _MPFR):
        return mpfr_to_json(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    return obj


def to_json(net: SigmoidNetwork) -> str:
    """Canonical text form: input_dim, widths, row-major layers, meta."""
    parts = []
    for W in net.layers:
        coeffs = ",".join(_encode(v) for v in W.ravel())
        parts.append(f'{{"rows":{W.shape[0]},"cols":{W.shape[1]},"coeffs":[{coeffs}]}}')
    meta = dict(net.meta)
    meta.setdefault("builder", "unknown")
    meta.setdefault("params", {})
    meta["precision_bits"] = _precision_bits(net)
    if net.taps:
        meta["taps"] = {
            k: {"layer": t["layer"], "const": _encode(t["const"]), "terms": {str(j): _encode(c) for j, c in t["terms"].items()}}
            for k, t in net.taps.items()
        }
    meta_s = json.dumps(_encode_meta(meta), sort_keys=True)
    return (
        f'{{"input_dim":{net.input_dim},"widths":{json.dumps(list(net.widths))},'
        f'"layers":[{",".join(parts)}],"meta":{meta_s}}}'
    )


def _precision_bits(net: SigmoidNetwork) -> int:
    if not net.is_extended:
        return 53
    for W in net.layers:
        for v in W.ravel():
            if isinstance(v, _MPFR):
                return int(v.precision)
    return 53


def from_json(text: str) -> SigmoidNetwork:
    head = json.loads(text, parse_float=str, parse_int=str)
    bits = int(head["meta"].get("precision_bits", 53))
    extended = bits > 53
    if extended:
        conv = lambda s: gmpy2.mpfr(s, bits) if s not in ("0", "-0") else 0  # noqa: E731
    else:
        conv = float
    layers = []
    for lay in head["layers"]:
        rows, cols = int(lay["rows"]), int(lay["cols"])
        vals = [conv(s) for s in lay["coeffs"]]
        W = np.array(vals, dtype=object if extended else float).reshape(rows, cols)
        layers.append(W)
    meta = json.loads(text)["meta"]  # plain floats for metadata
    taps = {}
    for k, t in head["meta"].get("taps", {}).items():
        taps[k] = {"layer": int(t["layer"]), "const": conv(t["const"]), "terms": {int(j): conv(c) for j, c in t["terms"].items()}}
    meta.pop("taps", None)
    widths = [int(k) for k in head["widths"]]
    return SigmoidNetwork(int(head["input_dim"]), widths, layers, meta, taps)


def save(net: SigmoidNetwork, path) -> None:
    Path(path).write_text(to_json(net))


def load(path) -> SigmoidNetwork:
    return from_json(Path(path).read_text())
