"""Reference layer: smooth target functions, Taylor polynomials, the piecewise
Taylor field on the fine partition and the three-stage corner recursion that
networks imitate.  Everything here works on plain float64 arrays.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .blocks import multi_indices
from .partition import GridPartition, cube_lefts_of, offset_vectors


@dataclass(frozen=True)
class SmoothFunction:
    """A (p, C)-smooth target with analytic partial derivatives.

    ``partial(ell, X)`` returns the derivative of multi-order ``ell`` at the
    rows of X for every |ell| <= q.
    """

    name: str
    d: int
    value: Callable[[np.ndarray], np.ndarray]
    partial: Callable[[tuple, np.ndarray], np.ndarray]
    q: int
    s: float
    C: float
    a: float = 1.0
    description: str = ""

    def __post_init__(self):
        if self.q < 0 or not 0 < self.s <= 1:
            raise ValueError("need q >= 0 and s in (0, 1]")

    @property
    def p(self) -> float:
        return self.q + self.s

    def __call__(self, X) -> np.ndarray:
        return self.value(_rows(X, self.d))

    def derivative(self, ell, X) -> np.ndarray:
        ell = tuple(int(e) for e in ell)
        if len(ell) != self.d:
            raise ValueError("multi-index has the wrong length")
        if sum(ell) == 0:
            return self.value(_rows(X, self.d))
        return self.partial(ell, _rows(X, self.d))


def _rows(X, d) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    if X.ndim == 0:
        X = X.reshape(1, 1)
    elif X.ndim == 1:
        X = X.reshape(-1, 1) if d == 1 else X.reshape(1, -1)
    return X


def _factorial_vec(ell) -> int:
    return math.prod(math.factorial(e) for e in ell)


def _power_vec(D: np.ndarray, ell) -> np.ndarray:
    out = np.ones(D.shape[0])
    for j, e in enumerate(ell):
        if e:
            out = out * D[:, j] ** e
    return out


def taylor_poly(f: SmoothFunction, q: int, x0, x) -> np.ndarray:
    """sum_{|j| <= q} d^j f(x0) (x - x0)^j / j!, row-wise over x0 and x."""
    X0 = _rows(x0, f.d)
    X = _rows(x, f.d)
    if X0.shape[0] == 1 and X.shape[0] > 1:
        X0 = np.repeat(X0, X.shape[0], axis=0)
    D = X - X0
    total = np.zeros(X.shape[0])
    for ell in multi_indices(f.d, q):
        total += f.derivative(ell, X0) * _power_vec(D, ell) / _factorial_vec(ell)
    return total


def piecewise_taylor(f: SmoothFunction, fine: GridPartition, x) -> np.ndarray:
    """Degree-q Taylor polynomial expanded at the corner of the fine cube containing x."""
    X = _rows(x, f.d)
    return taylor_poly(f, f.q, cube_lefts_of(fine, X), X)


@dataclass
class PhiState:
    """Batch of recursion values for n points."""

    phi_1_1: np.ndarray  # (n, d) the input
    phi_2_1: np.ndarray  # (n, d) coarse corner
    phi_3_1: np.ndarray  # (n, n_ell, M^d) derivative at every fine corner of the coarse cube
    phi_1_2: np.ndarray  # (n, d)
    phi_2_2: np.ndarray  # (n, d) fine corner
    phi_3_2: np.ndarray  # (n, n_ell) derivatives at the fine corner
    phi_1_3: np.ndarray  # (n,)
    indices: list = field(default_factory=list)


def phi_recursion(f: SmoothFunction, coarse: GridPartition, fine: GridPartition, x, q: int | None = None) -> PhiState:
    """Three-stage indicator recursion giving the piecewise Taylor value.

    Stage 1 picks the coarse corner and the derivatives at all M^d fine
    corners of that coarse cube through sums of exact coarse indicators.
    Stage 2 selects the fine corner by testing the offsets v_s against
    the input.  Stage 3 evaluates the Taylor polynomial.
    """
    q = f.q if q is None else q
    d, M = f.d, coarse.M
    X = _rows(x, d)
    n = X.shape[0]
    lefts = coarse.lefts()  # (M^d, d)
    side1 = coarse.side
    side2 = fine.side
    offs = offset_vectors(coarse.a, M, d)  # (M^d, d)
    ells = multi_indices(d, q)

    # stage 1: indicator sums over coarse cubes
    ind1 = _box_indicator(X[:, None, :], lefts[None, :, :], side1)  # (n, M^d)
    phi_2_1 = ind1 @ lefts
    phi_3_1 = np.zeros((n, len(ells), offs.shape[0]))
    for s, v in enumerate(offs):
        corners = lefts + v  # fine corner of offset s in every coarse cube
        for i, ell in enumerate(ells):
            phi_3_1[:, i, s] = ind1 @ f.derivative(ell, corners)

    # stage 2: offset tests against the fine cubes [phi_2_1 + v_s, + side2)
    phi_1_2 = X.copy()
    cand = phi_2_1[:, None, :] + offs[None, :, :]  # (n, M^d, d)
    ind2 = _box_indicator(X[:, None, :], cand, side2)  # (n, M^d)
    phi_2_2 = np.einsum("ns,nsd->nd", ind2, cand)
    phi_3_2 = np.einsum("ns,nis->ni", ind2, phi_3_1)

    # stage 3: polynomial in (phi_1_2 - phi_2_2)
    D = phi_1_2 - phi_2_2
    phi_1_3 = np.zeros(n)
    for i, ell in enumerate(ells):
        phi_1_3 += phi_3_2[:, i] * _power_vec(D, ell) / _factorial_vec(ell)
    return PhiState(X, phi_2_1, phi_3_1, phi_1_2, phi_2_2, phi_3_2, phi_1_3, ells)


def _box_indicator(X, lo, side) -> np.ndarray:
    """1 if lo <= x < lo + side componentwise (broadcast over the second axis)."""
    return np.all((X >= lo) & (X < lo + side), axis=-1).astype(float)


def cq_norm(f: SmoothFunction, region_half_width: float, grid_points_per_axis: int | None = None, q: int | None = None) -> float:
    """Grid maximum of |d^j f| over |j| <= q on [-h, h]^d; a lower bound on the true norm."""
    q = f.q if q is None else q
    if grid_points_per_axis is None:
        grid_points_per_axis = 10_000 if f.d == 1 else 512
    g = np.linspace(-region_half_width, region_half_width, grid_points_per_axis)
    X = np.stack(np.meshgrid(*([g] * f.d), indexing="ij"), axis=-1).reshape(-1, f.d)
    return float(max(np.max(np.abs(f.derivative(ell, X))) for ell in multi_indices(f.d, q)))


def holder_ratio(f: SmoothFunction, n_pairs: int = 2000, seed: int = 0) -> float:
    """max over random pairs of |d^l f(x) - d^l f(z)| / ||x - z||^s for |l| = q."""
    rng = np.random.default_rng(seed)
    X = rng.uniform(-f.a, f.a, (n_pairs, f.d))
    Z = rng.uniform(-f.a, f.a, (n_pairs, f.d))
    dist = np.linalg.norm(X - Z, axis=1) ** f.s
    best = 0.0
    for ell in multi_indices(f.d, f.q):
        if sum(ell) != f.q:
            continue
        best = max(best, float(np.max(np.abs(f.derivative(ell, X) - f.derivative(ell, Z)) / dist)))
    return best
