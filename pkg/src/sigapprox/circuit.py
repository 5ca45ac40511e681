"""Layered circuit builder that compiles to a SigmoidNetwork.

A ``Sig`` is an affine form over the outputs of one layer (layer 0 is the
input).  ``Circuit.neuron`` turns a signal on layer l into a sigmoid unit on
layer l+1.  Affine arithmetic between signals is only defined on a common
layer; carrying a value forward takes explicit identity blocks, exactly as in
a fixed-depth network.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .network_core import SigmoidNetwork


class LayerMismatch(ValueError):
    """Affine combination of signals living on different layers."""


@dataclass
class Sig:
    layer: int
    terms: dict = field(default_factory=dict)
    const: object = 0

    def _coerce(self, other) -> "Sig":
        if isinstance(other, Sig):
            if other.layer != self.layer:
                raise LayerMismatch(f"layer {self.layer} vs layer {other.layer}")
            return other
        return Sig(self.layer, {}, other)

    def __add__(self, other):
        o = self._coerce(other)
        terms = dict(self.terms)
        for j, c in o.terms.items():
            terms[j] = terms[j] + c if j in terms else c
        return Sig(self.layer, terms, self.const + o.const)

    __radd__ = __add__

    def __neg__(self):
        return Sig(self.layer, {j: -c for j, c in self.terms.items()}, -self.const)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, k):
        if isinstance(k, Sig):
            raise TypeError("signals multiply only by scalars; use a product block")
        return Sig(self.layer, {j: c * k for j, c in self.terms.items()}, self.const * k)

    __rmul__ = __mul__

    def __truediv__(self, k):
        return self * (1 / k)

    @property
    def is_constant(self) -> bool:
        return not self.terms


def lincomb(sigs, coeffs, const=0) -> Sig:
    """sum coeffs[i] * sigs[i] + const on the signals' common layer."""
    sigs = list(sigs)
    out = Sig(sigs[0].layer, {}, const)
    for s, c in zip(sigs, coeffs):
        out = out + s * c
    return out


class Circuit:
    """Accumulates sigmoid units layer by layer."""

    def __init__(self, input_dim: int, arith):
        self.input_dim = int(input_dim)
        self.ar = arith
        self.units: list[list[Sig]] = []  # units[l-1] = pre-activations of hidden layer l
        self.taps: dict[str, Sig] = {}

    def input(self, j: int) -> Sig:
        if not 0 <= j < self.input_dim:
            raise IndexError(j)
        return Sig(0, {j: self.ar.num(1)}, self.ar.num(0))

    def inputs(self) -> list[Sig]:
        return [self.input(j) for j in range(self.input_dim)]

    def const(self, layer: int, value) -> Sig:
        return Sig(layer, {}, self.ar.num(value))

    def neuron(self, pre: Sig) -> Sig:
        """Sigmoid unit sigma(pre) on layer pre.layer + 1."""
        lay = pre.layer + 1
        while len(self.units) < lay:
            self.units.append([])
        idx = len(self.units[lay - 1])
        self.units[lay - 1].append(pre)
        return Sig(lay, {idx: self.ar.num(1)}, self.ar.num(0))

    def width(self, layer: int) -> int:
        if layer == 0:
            return self.input_dim
        return len(self.units[layer - 1]) if layer - 1 < len(self.units) else 0

    def tap(self, name: str, sig: Sig) -> Sig:
        self.taps[name] = sig
        return sig

    def compile(self, out, builder: str, params: dict | None = None, extra_meta: dict | None = None) -> SigmoidNetwork:
        outs = out if isinstance(out, (list, tuple)) else [out]
        L = outs[0].layer
        if any(o.layer != L for o in outs):
            raise LayerMismatch("outputs must share the last layer")
        if L < 1:
            raise ValueError("a network needs at least one hidden layer")
        if len(self.units) > L:
            raise ValueError(f"units built beyond output layer {L}")
        dtype = self.ar.dtype
        layers = []
        for s in range(L):
            rows = self.units[s] if s < len(self.units) else []
            if not rows:
                raise ValueError(f"hidden layer {s + 1} is empty")
            W = np.zeros((len(rows), self.width(s) + 1), dtype=dtype)
            for i, pre in enumerate(rows):
                _fill(W, i, pre)
            layers.append(W)
        O = np.zeros((len(outs), self.width(L) + 1), dtype=dtype)
        for i, o in enumerate(outs):
            _fill(O, i, o)
        layers.append(O)
        widths = [self.width(s) for s in range(1, L + 1)]
        meta = {"builder": builder, "params": dict(params or {})}
        meta.update(extra_meta or {})
        taps = {
            k: {"layer": t.layer, "terms": dict(t.terms), "const": t.const}
            for k, t in self.taps.items()
            if t.layer <= L
        }
        return SigmoidNetwork(self.input_dim, widths, layers, meta, taps)


def _fill(W: np.ndarray, i: int, sig: Sig) -> None:
    W[i, 0] = sig.const
    for j, c in sig.terms.items():
        if c != 0:
            W[i, j + 1] = c
