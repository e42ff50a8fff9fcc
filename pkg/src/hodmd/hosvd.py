"""HOSVD-based reduction and the (iterative) multidimensional HODMD.

The snapshot tensor keeps time on its last axis.  Each direction is truncated
with the same relative tolerance, the spatial factors are folded back into
rescaled spatial modes, and DMD-d runs on the rescaled temporal modes.
"""

import warnings
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from sklearn.utils.validation import check_is_fitted

from . import svd as _svd
from ._validation import check_snapshots, check_tensor, check_tolerance
from .dmd import HODMD, extract_modes, fit_koopman
from .exceptions import ConfigurationError, InvalidShapeError
from .tensor import SnapshotTensor, TimeGrid, mode_product, unfold


@dataclass(frozen=True)
class HosvdFactors:
    """Truncated Tucker factors of a tensor with time on the last axis.

    ``factors[j]`` has orthonormal columns spanning direction ``j``;
    ``singular_values[j]`` are the retained singular values of the
    mode-``j`` unfolding; ``core`` has one axis per direction.
    """

    core: np.ndarray
    factors: tuple
    singular_values: tuple
    tail_ratios: tuple = ()

    @property
    def temporal(self):
        return self.factors[-1]

    @property
    def sv_t(self):
        return self.singular_values[-1]

    @property
    def ranks(self):
        return self.core.shape

    def reconstruct(self):
        out = self.core
        for j, f in enumerate(self.factors):
            out = mode_product(out, f, j)
        return out


@dataclass(frozen=True)
class RescaledForm:
    """``X[..., k] ~= sum_n spatial_modes[..., n] * rescaled_temporal[k, n]``."""

    spatial_modes: np.ndarray
    rescaled_temporal: np.ndarray

    @property
    def rank(self):
        return self.rescaled_temporal.shape[1]

    def reconstruct(self):
        s = self.spatial_modes.reshape(-1, self.rank)
        return (s @ self.rescaled_temporal.T).reshape(
            self.spatial_modes.shape[:-1] + (self.rescaled_temporal.shape[0],))


class IterativeResult(NamedTuple):
    expansion: object
    reconstruction: SnapshotTensor
    iterations: int
    converged: bool
    history: list
    tail_ratios: list


def hosvd_factorize(x, eps_svd):
    """Truncated HOSVD: one tolerance-cut SVD per unfolding, then project."""
    x = np.asarray(x.data if isinstance(x, SnapshotTensor) else x, dtype=np.float64)
    if x.ndim < 2:
        raise InvalidShapeError("HOSVD needs a tensor of order >= 2")
    x = check_tensor(x, x.ndim)
    check_tolerance(eps_svd, "eps_svd")
    svds = [_svd.truncated_svd(unfold(x, j), eps_svd) for j in range(x.ndim)]
    factors = tuple(s.left_modes for s in svds)
    core = x
    for j, f in enumerate(factors):
        core = mode_product(core, f.T, j)
    return HosvdFactors(
        core=core,
        factors=factors,
        singular_values=tuple(s.singular_values for s in svds),
        tail_ratios=tuple(s.tail_ratio for s in svds),
    )


def rescale(factors):
    """Fold spatial factors into the core and scale temporal modes by their singular values."""
    sigma = factors.sv_t
    live = sigma > 0
    if not np.all(live):
        warnings.warn(f"dropping {np.count_nonzero(~live)} temporal mode(s) with zero "
                      "singular value", RuntimeWarning, stacklevel=2)
    spatial = factors.core[..., live]
    for j, f in enumerate(factors.factors[:-1]):
        spatial = mode_product(spatial, f, j)
    return RescaledForm(
        spatial_modes=spatial / sigma[live],
        rescaled_temporal=factors.temporal[:, live] * sigma[live],
    )


def _grid_for(x, grid):
    if grid is not None:
        if grid.count != x.shape[-1]:
            raise InvalidShapeError(f"time grid has {grid.count} points, tensor has "
                                    f"{x.shape[-1]} snapshots")
        return grid
    return TimeGrid(dt=8e-3, count=x.shape[-1])


def multidim_hodmd(x, d=2, eps_svd=5e-4, eps_dmd=5e-4, grid=None):
    """HOSVD reduction followed by DMD-d on the rescaled temporal modes.

    Returns the expansion and its reconstruction on ``grid``.
    """
    if isinstance(x, SnapshotTensor):
        grid = x.grid if grid is None else grid
        x = x.data
    x = np.asarray(x, dtype=np.float64)
    if x.ndim < 2:
        raise InvalidShapeError("need at least one spatial axis and a time axis")
    check_snapshots(x.reshape(-1, x.shape[-1]))
    exp, rec, _ = _multidim_hodmd(x, d, eps_svd, eps_dmd, _grid_for(x, grid))
    return exp, rec


def _multidim_hodmd(x, d, eps_svd, eps_dmd, grid):
    factors = hosvd_factorize(x, eps_svd)
    form = rescale(factors)
    reduced = form.rescaled_temporal.T
    basis = form.spatial_modes.reshape(-1, form.rank)
    koop = fit_koopman(reduced, d)
    exp = extract_modes(koop, basis, reduced, grid, eps_dmd,
                        spatial_dims=x.shape[:-1], eps_svd=eps_svd)
    return exp, exp.reconstruct(grid), factors.tail_ratios[-1]


def iterative_hodmd(x, d=2, eps_svd=5e-4, eps_dmd=5e-4, grid=None, max_iter=20):
    """Repeat :func:`multidim_hodmd` on its own reconstruction.

    Stops as soon as the pair (SVD rank, number of DMD modes) repeats between
    consecutive iterations.  Hitting ``max_iter`` first is reported through
    ``converged=False``, not raised.
    """
    if isinstance(max_iter, bool) or int(max_iter) != max_iter or max_iter < 1:
        raise ConfigurationError(f"max_iter must be a positive integer, got {max_iter!r}")
    if isinstance(x, SnapshotTensor):
        grid = x.grid if grid is None else grid
        x = x.data
    current = np.asarray(x, dtype=np.float64)
    grid = _grid_for(current, grid)

    history, tails = [], []
    prev = None
    for it in range(1, int(max_iter) + 1):
        exp, rec, tail = _multidim_hodmd(current, d, eps_svd, eps_dmd, grid)
        state = (exp.svd_rank, exp.n_modes)
        history.append(state)
        tails.append(tail)
        if state == prev:
            return IterativeResult(exp, rec, it, True, history, tails)
        prev = state
        current = rec.data
    return IterativeResult(exp, rec, int(max_iter), False, history, tails)


class MultidimHODMD(HODMD):
    """HOSVD + DMD-d estimator for image stacks shaped ``(Nx, Ny, K)``.

    Parameters
    ----------
    d, eps_svd, eps_dmd, dt, t0
        As in :class:`~hodmd.dmd.HODMD`.
    iterative : bool, default=True
        Re-run the decomposition on its own reconstruction until the number
        of retained modes settles.
    max_iter : int, default=20
        Iteration cap when ``iterative`` is set.

    Attributes
    ----------
    expansion_ : DmdExpansion
    reconstruction_ : ndarray
        Denoised tensor on the training grid.
    n_iter_ : int
    converged_ : bool
    """

    def __init__(self, d=2, eps_svd=5e-4, eps_dmd=5e-4, dt=8e-3, t0=0.0,
                 iterative=True, max_iter=20):
        super().__init__(d=d, eps_svd=eps_svd, eps_dmd=eps_dmd, dt=dt, t0=t0)
        self.iterative = iterative
        self.max_iter = max_iter

    def fit(self, X, y=None):
        x = np.asarray(X, dtype=np.float64)
        grid = TimeGrid(dt=self.dt, count=x.shape[-1], t0=self.t0)
        n_iter = self.max_iter if self.iterative else 1
        res = iterative_hodmd(x, self.d, self.eps_svd, self.eps_dmd, grid, n_iter)
        self.expansion_ = res.expansion
        self.reconstruction_ = np.array(res.reconstruction.data)
        self.n_iter_ = res.iterations
        self.converged_ = res.converged if self.iterative else True
        self._set_summary()
        return self

    def transform(self, X=None):
        """Denoised reconstruction of the training data."""
        check_is_fitted(self, "reconstruction_")
        return self.reconstruction_

    def fit_transform(self, X, y=None):
        return self.fit(X).transform()
