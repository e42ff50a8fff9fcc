"""Dense snapshot tensors and the matrix views used by the decompositions.

All reshapes use row-major (C) order with the last index varying fastest.  The
snapshot-matrix view moves the time axis to the end and flattens the remaining
(spatial) axes into rows, so pixel ``(x1, x2)`` of an ``Nx x Ny`` image lands on
row ``x1 * Ny + x2`` for every snapshot.
"""

from dataclasses import dataclass, field

import numpy as np

from .exceptions import InvalidInputError, InvalidShapeError


@dataclass(frozen=True)
class TimeGrid:
    """Uniform sampling times ``t_k = t0 + k * dt`` for ``k = 0 .. count-1``."""

    dt: float
    count: int
    t0: float = 0.0

    def __post_init__(self):
        if not np.isfinite(self.dt) or self.dt <= 0:
            raise InvalidInputError(f"dt must be a positive finite number, got {self.dt}")
        if int(self.count) != self.count or self.count < 1:
            raise InvalidInputError(f"count must be a positive integer, got {self.count}")
        object.__setattr__(self, "count", int(self.count))

    @property
    def times(self):
        return self.t0 + self.dt * np.arange(self.count, dtype=np.float64)

    def with_count(self, count):
        return TimeGrid(dt=self.dt, count=count, t0=self.t0)


@dataclass(frozen=True)
class SnapshotTensor:
    """Immutable real tensor of order 2-4 with one axis indexing snapshots.

    Parameters
    ----------
    data : array_like
        Real values; copied to a read-only float64 array.
    dt : float
        Time step between consecutive snapshots, in seconds.
    time_axis : int
        Axis holding the snapshots.  Negative values count from the end.
    """

    data: np.ndarray
    dt: float = 8e-3
    time_axis: int = -1
    _grid: TimeGrid = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        arr = np.array(self.data, dtype=np.float64, order="C", copy=True)
        if not 2 <= arr.ndim <= 4:
            raise InvalidShapeError(f"snapshot tensors have order 2-4, got {arr.ndim}")
        if not np.all(np.isfinite(arr)):
            raise InvalidInputError("snapshot tensor contains NaN or Inf")
        axis = _normalize_axis(self.time_axis, arr.ndim)
        arr.setflags(write=False)
        object.__setattr__(self, "data", arr)
        object.__setattr__(self, "time_axis", axis)
        object.__setattr__(self, "_grid", TimeGrid(dt=self.dt, count=arr.shape[axis]))

    @property
    def dims(self):
        return self.data.shape

    @property
    def n_snapshots(self):
        return self.data.shape[self.time_axis]

    @property
    def spatial_dims(self):
        return tuple(n for ax, n in enumerate(self.data.shape) if ax != self.time_axis)

    @property
    def grid(self):
        return self._grid

    def __array__(self, dtype=None, copy=None):
        if dtype is None:
            return self.data
        return self.data.astype(dtype)


def _normalize_axis(axis, ndim):
    if not -ndim <= axis < ndim:
        raise InvalidShapeError(f"axis {axis} out of range for order-{ndim} tensor")
    return axis % ndim


def _values(t):
    if isinstance(t, SnapshotTensor):
        return t.data
    return np.asarray(t, dtype=np.float64)


def as_snapshot_matrix(t, time_axis=None):
    """Return the ``J x K`` snapshot matrix of ``t``.

    Column ``k`` is snapshot ``k`` flattened in row-major order over the
    remaining axes (their original order is kept).
    """
    data = _values(t)
    if data.ndim < 2:
        raise InvalidShapeError(f"need at least a 2-D tensor, got order {data.ndim}")
    if time_axis is None:
        time_axis = t.time_axis if isinstance(t, SnapshotTensor) else -1
    axis = _normalize_axis(time_axis, data.ndim)
    moved = np.moveaxis(data, axis, -1)
    return np.ascontiguousarray(moved.reshape(-1, moved.shape[-1]))


def from_snapshot_matrix(matrix, spatial_dims, dt=8e-3, time_axis=-1):
    """Inverse of :func:`as_snapshot_matrix`; returns a :class:`SnapshotTensor`."""
    matrix = np.asarray(matrix, dtype=np.float64)
    if matrix.ndim != 2:
        raise InvalidShapeError("snapshot matrix must be 2-D")
    spatial_dims = tuple(int(n) for n in spatial_dims)
    if int(np.prod(spatial_dims)) != matrix.shape[0]:
        raise InvalidShapeError(
            f"{matrix.shape[0]} rows cannot be refolded into spatial extents {spatial_dims}"
        )
    data = matrix.reshape(spatial_dims + (matrix.shape[1],))
    ndim = data.ndim
    axis = _normalize_axis(time_axis, ndim)
    return SnapshotTensor(np.moveaxis(data, -1, axis), dt=dt, time_axis=axis)


def unfold(t, mode):
    """Mode-``mode`` unfolding.

    Rows are indexed by axis ``mode``; columns run over the remaining axes in
    their original order, row-major.
    """
    data = _values(t)
    mode = _normalize_axis(mode, data.ndim)
    return np.ascontiguousarray(np.moveaxis(data, mode, 0).reshape(data.shape[mode], -1))


def refold(matrix, mode, shape):
    """Inverse of :func:`unfold` for a tensor of the given ``shape``."""
    shape = tuple(int(n) for n in shape)
    mode = _normalize_axis(mode, len(shape))
    matrix = np.asarray(matrix)
    moved_shape = (shape[mode],) + shape[:mode] + shape[mode + 1:]
    if matrix.size != int(np.prod(shape)) or matrix.shape[0] != shape[mode]:
        raise InvalidShapeError(f"matrix of shape {matrix.shape} does not refold to {shape}")
    return np.moveaxis(matrix.reshape(moved_shape), 0, mode)


def mode_product(tensor, matrix, mode):
    """Multiply ``tensor`` along ``mode`` by ``matrix`` (``matrix @ unfold``)."""
    tensor = np.asarray(tensor)
    shape = list(tensor.shape)
    shape[mode] = matrix.shape[0]
    return refold(matrix @ unfold(tensor, mode), mode, shape)


def frobenius_norm(t):
    """Square root of the sum of squared entries."""
    data = _values(t)
    return float(np.sqrt(np.sum(data * data)))
