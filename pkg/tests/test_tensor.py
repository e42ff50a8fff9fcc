import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import array_shapes, arrays

from hodmd.exceptions import InvalidInputError, InvalidShapeError
from hodmd.tensor import (SnapshotTensor, TimeGrid, as_snapshot_matrix, frobenius_norm,
                          from_snapshot_matrix, mode_product, refold, unfold)

finite = st.floats(-1e6, 1e6, allow_nan=False)
tensors = arrays(np.float64, array_shapes(min_dims=2, max_dims=4, min_side=1, max_side=5),
                 elements=finite)


def test_snapshot_matrix_layout():
    x = np.arange(12.0).reshape(2, 2, 3)
    v = as_snapshot_matrix(x)
    assert v.shape == (4, 3)
    # pixel (x1=0, x2=1) sits on row 0 * 2 + 1 for every snapshot
    for k in range(3):
        assert v[1, k] == x[0, 1, k]
        assert v[3, k] == x[1, 1, k]


def test_snapshot_matrix_time_axis_not_last():
    x = np.arange(24.0).reshape(3, 2, 4)
    t = SnapshotTensor(x, time_axis=0)
    v = as_snapshot_matrix(t)
    assert v.shape == (8, 3)
    back = from_snapshot_matrix(v, t.spatial_dims, time_axis=0)
    assert np.array_equal(back.data, x)


def test_column_norms_match_snapshot_norms(rng):
    x = rng.normal(size=(3, 4, 5))
    v = as_snapshot_matrix(x)
    for k in range(5):
        total = 0.0
        for i in range(3):
            for j in range(4):
                total += x[i, j, k] ** 2
        assert np.linalg.norm(v[:, k]) == pytest.approx(np.sqrt(total), rel=1e-14)


@settings(max_examples=60, deadline=None)
@given(tensors)
def test_snapshot_matrix_round_trip_is_bit_exact(x):
    v = as_snapshot_matrix(x)
    back = from_snapshot_matrix(v, x.shape[:-1])
    assert back.data.tobytes() == np.ascontiguousarray(x).tobytes()


@settings(max_examples=60, deadline=None)
@given(tensors, st.data())
def test_unfold_refold_round_trip(x, data):
    mode = data.draw(st.integers(0, x.ndim - 1))
    m = unfold(x, mode)
    assert m.shape[0] == x.shape[mode]
    assert np.array_equal(refold(m, mode, x.shape), x)
    assert frobenius_norm(m) == pytest.approx(frobenius_norm(x), rel=1e-12)


def test_unfold_matrix_mode0_is_identity():
    a = np.arange(6.0).reshape(2, 3)
    assert np.array_equal(unfold(a, 0), a)
    assert np.array_equal(unfold(a, 1), a.T)


def test_unfoldings_of_rank_one_tensor(rng):
    a, b, c = rng.normal(size=3), rng.normal(size=4), rng.normal(size=5)
    x = np.einsum("i,j,k->ijk", a, b, c)
    for mode in range(3):
        assert np.linalg.matrix_rank(unfold(x, mode)) == 1


def test_mode_product_matches_einsum(rng):
    x = rng.normal(size=(3, 4, 5))
    m = rng.normal(size=(2, 4))
    assert np.allclose(mode_product(x, m, 1), np.einsum("ij,ajk->aik", m, x))


@pytest.mark.parametrize("x, expected", [
    (np.zeros((2, 3)), 0.0),
    (np.array([[3.0]]), 3.0),
    (np.ones((2, 2)), 2.0),
])
def test_frobenius_norm(x, expected):
    assert frobenius_norm(x) == expected


def test_snapshot_tensor_validation():
    with pytest.raises(InvalidShapeError):
        SnapshotTensor(np.zeros(4))
    with pytest.raises(InvalidShapeError):
        as_snapshot_matrix(np.zeros(4))
    with pytest.raises(InvalidInputError):
        SnapshotTensor(np.array([[1.0, np.nan]]))
    with pytest.raises(InvalidShapeError):
        unfold(np.zeros((2, 2)), 2)


def test_snapshot_tensor_is_read_only():
    t = SnapshotTensor(np.ones((2, 3)))
    with pytest.raises(ValueError):
        t.data[0, 0] = 5.0
    assert t.dims == (2, 3)
    assert t.n_snapshots == 3
    assert t.grid.count == 3


def test_time_grid():
    g = TimeGrid(dt=0.5, count=4, t0=1.0)
    assert np.array_equal(g.times, [1.0, 1.5, 2.0, 2.5])
    assert np.array_equal(g.with_count(6).times[:4], g.times)
    with pytest.raises(InvalidInputError):
        TimeGrid(dt=0.0, count=3)
    with pytest.raises(InvalidInputError):
        TimeGrid(dt=1.0, count=0)
