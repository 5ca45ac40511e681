import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from sigapprox.partition import (
    GridPartition,
    OutOfDomain,
    bspline_weight,
    cube_index,
    cube_left,
    distance_to_faces,
    inner_cube_contains,
    offset_vector,
    partition_of_unity_residual,
    shifted_partitions,
)


def test_cube_index_half_open():
    P = GridPartition(1.0, 2, 1)
    assert cube_index(P, [-1.0]).index == 1
    assert cube_index(P, [0.0]).index == 2
    assert cube_left(cube_index(P, [-1.0]))[0] == -1.0
    with pytest.raises(OutOfDomain):
        cube_index(P, [1.0])
    with pytest.raises(OutOfDomain):
        cube_index(P, [-1.0001])


def test_fine_cube_corner_and_offsets():
    fine = GridPartition(1.0, 2, 1, "fine")
    assert cube_left(cube_index(fine, [0.99]))[0] == pytest.approx(0.5)
    assert np.all(offset_vector(GridPartition(1.0, 3, 2), 1) == 0)
    with pytest.raises(IndexError):
        offset_vector(GridPartition(1.0, 3, 2), 10)


def test_inner_cube():
    P = GridPartition(1.0, 2, 2)
    c = cube_index(P, [0.5, 0.5])
    assert inner_cube_contains(c, [0.5, 0.5], 0.2)
    assert not inner_cube_contains(c, [0.05, 0.5], 0.1)


def test_hat_weight_center_and_faces():
    fine = GridPartition(1.0, 3, 2, "fine")
    h = fine.side / 2
    corner = fine.lefts()[7]
    assert bspline_weight(fine, corner + h) == pytest.approx(1.0)
    assert bspline_weight(fine, corner) == 0.0
    assert bspline_weight(fine, corner + [h, 0.0]) <= 1e-15


def test_hat_weight_small_on_strips_d1():
    M, p = 3, 1
    fine = GridPartition(1.0, M, 1, "fine")
    rng = np.random.default_rng(0)
    X = rng.uniform(-1, 1, (20000, 1))
    strip = distance_to_faces(fine, X) < 1 / M ** (2 * p + 2)
    assert np.max(bspline_weight(fine, X[strip])) <= 1 / M ** (2 * p)


@pytest.mark.parametrize("d,count", [(1, 2), (2, 4)])
def test_shifted_partition_count(d, count):
    parts = shifted_partitions(1.0, 3, d)
    assert len(parts) == count
    assert parts[0].shift_mask() == (0,) * d


@given(st.integers(2, 6), st.integers(1, 2), st.integers(0, 2**31))
def test_partition_of_unity(M, d, seed):
    X = np.random.default_rng(seed).uniform(-1 + 1 / M**2, 1, (500, d)) * 0.999
    assert np.max(partition_of_unity_residual(1.0, M, d, X)) <= 1e-12


@given(st.integers(1, 6), st.floats(-0.999, 0.999))
def test_point_lies_in_its_cube(M, x):
    P = GridPartition(1.0, M, 1, "fine")
    k = int(P.axis_indices([[x]])[0, 0])
    assert cube_left(cube_index(P, [x]))[0] <= x < P.origin[0] + (k + 1) * P.side
