"""Equivolume half-open cube partitions of [-a, a)^d, their shifted copies, and the hat weight.

Cubes are numbered from 1 in lexicographic order with the first coordinate
most significant.  Fine cubes inside a coarse cube are enumerated by the same
rule, which makes the offset of the k-th fine cube independent of its parent.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product as iproduct

import numpy as np


class OutOfDomain(ValueError):
    """Point lies outside the tiled region of a partition."""


@dataclass(frozen=True)
class GridPartition:
    a: float
    M: int
    d: int
    level: str = "coarse"
    shift: tuple = ()

    def __post_init__(self):
        if self.level not in ("coarse", "fine"):
            raise ValueError("level must be 'coarse' or 'fine'")
        if not self.a > 0 or self.M < 1 or self.d < 1:
            raise ValueError("need a > 0, M >= 1, d >= 1")
        sh = tuple(float(s) for s in self.shift) if self.shift else (0.0,) * self.d
        if len(sh) != self.d:
            raise ValueError("shift must have d entries")
        object.__setattr__(self, "shift", sh)

    @property
    def per_axis(self) -> int:
        return self.M if self.level == "coarse" else self.M * self.M

    @property
    def side(self) -> float:
        return 2 * self.a / self.per_axis

    @property
    def n_cubes(self) -> int:
        return self.per_axis**self.d

    @property
    def origin(self) -> np.ndarray:
        return -self.a + np.asarray(self.shift)

    def shift_mask(self) -> tuple[int, ...]:
        return tuple(int(s != 0) for s in self.shift)

    def with_level(self, level: str) -> "GridPartition":
        return GridPartition(self.a, self.M, self.d, level, self.shift)

    # index helpers ---------------------------------------------------------

    def axis_indices(self, X) -> np.ndarray:
        """0-based per-axis cube positions for points X (shape (n, d)); raises outside the region."""
        X = np.atleast_2d(np.asarray(X, dtype=float))
        if X.shape[1] != self.d:
            raise ValueError(f"expected points of dimension {self.d}")
        rel = (X - self.origin) / self.side
        idx = np.floor(rel).astype(np.int64)
        # floor of a rounded quotient can land one cube off; fix against the edges origin + k * side
        idx = np.where(X < self.origin + idx * self.side, idx - 1, idx)
        idx = np.where(X >= self.origin + (idx + 1) * self.side, idx + 1, idx)
        if np.any(idx < 0) or np.any(idx >= self.per_axis):
            raise OutOfDomain("point outside [-a+shift, a+shift)^d")
        return idx

    def flat_index(self, axis_idx: np.ndarray) -> np.ndarray:
        """1-based lexicographic number from per-axis positions."""
        n = self.per_axis
        flat = np.zeros(axis_idx.shape[0], dtype=np.int64)
        for j in range(self.d):
            flat = flat * n + axis_idx[:, j]
        return flat + 1

    def unflatten(self, index: int) -> np.ndarray:
        if not 1 <= index <= self.n_cubes:
            raise IndexError(f"cube index {index} outside [1, {self.n_cubes}]")
        k = index - 1
        out = np.zeros(self.d, dtype=np.int64)
        for j in reversed(range(self.d)):
            out[j] = k % self.per_axis
            k //= self.per_axis
        return out

    def lefts(self) -> np.ndarray:
        """Corners of all cubes in index order, shape (n_cubes, d)."""
        grid = np.array(list(iproduct(range(self.per_axis), repeat=self.d)), dtype=float)
        return self.origin + grid * self.side


@dataclass(frozen=True)
class CubeRef:
    partition: GridPartition
    index: int

    def __post_init__(self):
        if not 1 <= self.index <= self.partition.n_cubes:
            raise IndexError(f"cube index {self.index} outside [1, {self.partition.n_cubes}]")


def cube_index(part: GridPartition, x) -> CubeRef:
    """The unique half-open cube containing x."""
    x = np.asarray(x, dtype=float).reshape(1, -1)
    idx = part.axis_indices(x)
    return CubeRef(part, int(part.flat_index(idx)[0]))


def cube_indices(part: GridPartition, X) -> np.ndarray:
    """Vectorized cube_index returning 1-based indices."""
    return part.flat_index(part.axis_indices(X))


def cube_left(c: CubeRef) -> np.ndarray:
    p = c.partition
    return p.origin + p.unflatten(c.index) * p.side


def cube_lefts_of(part: GridPartition, X) -> np.ndarray:
    """Corner of the cube containing each row of X."""
    return part.origin + part.axis_indices(X) * part.side


def offset_vector(part: GridPartition, k: int) -> np.ndarray:
    """Position of the k-th fine cube relative to its coarse parent's corner."""
    M, d = part.M, part.d
    if not 1 <= k <= M**d:
        raise IndexError(f"offset index {k} outside [1, {M ** d}]")
    step = 2 * part.a / (M * M)
    j = k - 1
    out = np.zeros(d)
    for i in reversed(range(d)):
        out[i] = (j % M) * step
        j //= M
    return out


def offset_vectors(a: float, M: int, d: int) -> np.ndarray:
    """All M^d offsets in index order, shape (M^d, d)."""
    step = 2 * a / (M * M)
    return np.array(list(iproduct(range(M), repeat=d)), dtype=float) * step


def inner_cube_contains(c: CubeRef, x, delta: float) -> bool:
    side = c.partition.side
    if not 2 * delta < side:
        raise ValueError("delta too large for the cube side")
    left = cube_left(c)
    x = np.asarray(x, dtype=float)
    return bool(np.all((left + delta <= x) & (x < left + side - delta)))


def distance_to_faces(part: GridPartition, X) -> np.ndarray:
    """Per point, the smallest distance to a face of its own cube (any axis)."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    left = cube_lefts_of(part, X)
    rel = X - left
    return np.min(np.minimum(rel, part.side - rel), axis=1)


def bspline_weight(part: GridPartition, x) -> float | np.ndarray:
    """prod_j (1 - (M^2/a)|left_j + a/M^2 - x_j|)_+ on the fine cube containing x.

    Accepts a single point or an array of points (rows).
    """
    X = np.asarray(x, dtype=float)
    single = X.ndim <= 1
    X = X.reshape(1, -1) if single else X
    fine = part if part.level == "fine" else part.with_level("fine")
    left = cube_lefts_of(fine, X)
    h = fine.a / (fine.M * fine.M)
    w = np.prod(np.maximum(1 - np.abs(left + h - X) / h, 0.0), axis=1)
    return float(w[0]) if single else w


def shifted_partitions(a: float, M: int, d: int, level: str = "fine") -> list[GridPartition]:
    """All 2^d partitions with a subset of coordinates shifted by a/M^2; unshifted first."""
    h = a / (M * M)
    out = []
    for mask in iproduct((0, 1), repeat=d):
        out.append(GridPartition(a, M, d, level, tuple(h * m for m in mask)))
    return out


def partition_of_unity_residual(a: float, M: int, d: int, X) -> np.ndarray:
    """|sum_v w_v(x) - 1| for each row of X."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    total = np.zeros(X.shape[0])
    for part in shifted_partitions(a, M, d, "fine"):
        total += bspline_weight(part, X)
    return np.abs(total - 1)
