"""Missing-slice reconstruction by interpolating right singular vectors.

For every frame ``k`` the neighbouring slices' images are stacked as the
columns of ``M = W S T^T``.  Rows of ``T`` are attached to the slice positions,
a new row is interpolated at the missing slice's position, and the frame is
read off ``W S T_new^T``.

With only the two adjacent slices as support every smooth scheme reduces to
linear interpolation at the midpoint; the ``extended-spline`` scheme uses two
slices on each side so the spline is genuinely cubic.
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np
import scipy.interpolate
from sklearn.base import BaseEstimator, TransformerMixin

from ._validation import check_tensor
from .exceptions import BoundaryError, ConfigurationError, DegenerateInputError, \
    InvalidShapeError

SCHEMES = ("spline", "linear", "cubic", "pchip", "makima", "nearest", "next",
           "previous", "extended-spline")
_STEP_SCHEMES = ("nearest", "next", "previous")


@dataclass(frozen=True)
class RepairReport:
    """Outcome of :func:`repair_slice`.

    ``rrmse_vs_truth`` compares the repaired slice with the slice originally in
    the input; ``rrmse_volume`` compares the whole 4-D tensors.  Both are
    ``None`` when no ground truth was available.
    """

    repaired_slice: np.ndarray
    volume: np.ndarray
    slice_index: int
    method: str
    rrmse_vs_truth: Optional[float] = None
    rrmse_volume: Optional[float] = None


def rrmse(approx, truth):
    """Relative root mean square error ``||approx - truth||_F / ||truth||_F``."""
    approx = np.asarray(approx, dtype=np.float64)
    truth = np.asarray(truth, dtype=np.float64)
    if approx.shape != truth.shape:
        raise InvalidShapeError(f"shape mismatch: {approx.shape} vs {truth.shape}")
    denom = np.linalg.norm(truth.ravel())
    if denom == 0:
        raise DegenerateInputError("RRMSE is undefined for an all-zero reference")
    return float(np.linalg.norm((approx - truth).ravel()) / denom)


def _interpolate_rows(abscissae, rows, target, scheme):
    """Evaluate each column of ``rows`` (sampled at ``abscissae``) at ``target``."""
    x = np.asarray(abscissae, dtype=np.float64)
    if scheme in _STEP_SCHEMES:
        return scipy.interpolate.interp1d(x, rows, kind=scheme, axis=0)(target)
    if scheme == "linear" or x.size == 2:
        f = scipy.interpolate.interp1d(x, rows, kind="linear", axis=0)
        return f(target)
    if scheme in ("spline", "extended-spline"):
        if x.size == 3:
            return scipy.interpolate.make_interp_spline(x, rows, k=2, axis=0)(target)
        return scipy.interpolate.CubicSpline(x, rows, axis=0, bc_type="not-a-knot")(target)
    if scheme == "cubic":
        return scipy.interpolate.CubicSpline(x, rows, axis=0, bc_type="natural")(target)
    if scheme == "pchip":
        return scipy.interpolate.PchipInterpolator(x, rows, axis=0)(target)
    if scheme == "makima":
        return scipy.interpolate.Akima1DInterpolator(x, rows, axis=0, method="makima")(target)
    raise ConfigurationError(f"unknown interpolation scheme {scheme!r}")


def interpolate_frame(columns, scheme="spline", positions=(0.0, 2.0), target=1.0):
    """Reconstruct one missing image from neighbouring images.

    Parameters
    ----------
    columns : (J, P) array_like
        Flattened neighbour images, one per column, ordered by position.
    scheme : str
        One of :data:`SCHEMES`.
    positions : sequence of float
        Slice coordinates of the columns.
    target : float
        Slice coordinate of the missing image.

    Returns
    -------
    (J,) ndarray
    """
    if scheme not in SCHEMES:
        raise ConfigurationError(f"unknown interpolation scheme {scheme!r}; "
                                 f"choose from {', '.join(SCHEMES)}")
    m = np.asarray(columns, dtype=np.float64)
    if m.ndim != 2 or m.shape[1] != len(positions) or m.shape[1] < 2:
        raise InvalidShapeError("columns must be a J x P matrix with one column per position")
    if not np.any(m):
        raise DegenerateInputError("all neighbour images are zero")

    # untruncated: the neighbours themselves must be reproduced exactly
    u, s, vh = np.linalg.svd(m, full_matrices=False)
    t_new = _interpolate_rows(positions, vh.T, target, scheme)
    return (u * s) @ t_new


def neighbour_slices(n_slices, index, scheme):
    """Indices of the slices used to rebuild slice ``index`` (0-based)."""
    reach = 2 if scheme == "extended-spline" else 1
    if index - reach < 0 or index + reach >= n_slices:
        raise BoundaryError(
            f"slice {index} needs {reach} neighbour(s) on each side; the volume has "
            f"{n_slices} slices (scheme {scheme!r})")
    return [j for j in range(index - reach, index + reach + 1) if j != index]


def repair_slice(volume, index, scheme="spline", validate=True):
    """Rebuild slice ``index`` of an ``(Nx, Ny, I, K)`` volume frame by frame.

    The slice's current content is ignored.  If ``validate`` is set and the
    content is finite it is used as ground truth for the RRMSE fields of the
    report; a missing slice may be passed as NaN.
    """
    if scheme not in SCHEMES:
        raise ConfigurationError(f"unknown interpolation scheme {scheme!r}; "
                                 f"choose from {', '.join(SCHEMES)}")
    x = np.asarray(volume, dtype=np.float64)
    if x.ndim != 4:
        raise InvalidShapeError(f"expected an (Nx, Ny, slices, frames) volume, got order {x.ndim}")
    n_slices = x.shape[2]
    if not 0 <= index < n_slices:
        raise BoundaryError(f"slice {index} outside 0..{n_slices - 1}")
    support = neighbour_slices(n_slices, index, scheme)
    check_tensor(x[:, :, support], 4)

    nx, ny, _, k = x.shape
    out = np.empty((nx, ny, k))
    for f in range(k):
        cols = np.stack([x[:, :, j, f].ravel() for j in support], axis=1)
        out[:, :, f] = interpolate_frame(cols, scheme, positions=support,
                                         target=index).reshape(nx, ny)

    truth = x[:, :, index]
    repaired = x.copy()
    repaired[:, :, index] = out
    err = err_vol = None
    if validate and np.all(np.isfinite(truth)) and np.any(truth):
        err = rrmse(out, truth)
        err_vol = rrmse(repaired, x)
    return RepairReport(repaired_slice=out, volume=repaired, slice_index=index,
                        method=scheme, rrmse_vs_truth=err, rrmse_volume=err_vol)


class SliceRepairer(TransformerMixin, BaseEstimator):
    """Replace one slice of an ``(Nx, Ny, slices, frames)`` volume by interpolation.

    Parameters
    ----------
    slice_index : int
        0-based index of the slice to rebuild.
    scheme : str, default="spline"
        Interpolation scheme, one of :data:`SCHEMES`.
    """

    def __init__(self, slice_index, scheme="spline"):
        self.slice_index = slice_index
        self.scheme = scheme

    def fit(self, X, y=None):
        x = np.asarray(X)
        if x.ndim != 4:
            raise InvalidShapeError("X must have shape (Nx, Ny, slices, frames)")
        neighbour_slices(x.shape[2], self.slice_index, self.scheme)
        self.n_slices_ = x.shape[2]
        return self

    def transform(self, X):
        self.report_ = repair_slice(X, self.slice_index, self.scheme)
        return self.report_.volume
