"""Per-slice decomposition, joint second pass and extension of whole volumes."""

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import List

import numpy as np

from ._validation import check_delay, check_tolerance
from .dmd import DmdExpansion
from .exceptions import ConfigurationError, InvalidInputError, InvalidShapeError
from .hosvd import iterative_hodmd
from .rom import GROWTH_POLICIES, extend_frames
from .tensor import TimeGrid

THREADS_ENV = "HODMD_NUM_THREADS"


@dataclass(frozen=True)
class RunConfig:
    d: int = 2
    eps_svd: float = 5e-4
    eps_dmd: float = 5e-4
    dt: float = 8e-3
    iterative: bool = True
    max_iter: int = 20
    growth_policy: str = "zero-delta"

    def __post_init__(self):
        check_delay(self.d)
        for name in ("eps_svd", "eps_dmd"):
            value = getattr(self, name)
            check_tolerance(value, name)
            if value >= 1:
                raise ConfigurationError(f"{name} must be < 1")
        if not self.dt > 0:
            raise ConfigurationError(f"dt must be positive, got {self.dt}")
        if int(self.max_iter) < 1:
            raise ConfigurationError("max_iter must be >= 1")
        if self.growth_policy not in GROWTH_POLICIES:
            raise ConfigurationError(f"growth_policy must be one of {GROWTH_POLICIES}")

    def grid(self, count):
        return TimeGrid(dt=self.dt, count=count)


@dataclass
class VolumeDecomposition:
    slice_expansions: List[DmdExpansion]
    slice_iterations: List[int]
    slice_converged: List[bool]
    reconstruction: np.ndarray
    joint_expansion: DmdExpansion
    joint_reconstruction: np.ndarray
    joint_iterations: int


def as_volume(x):
    """Promote an ``(Nx, Ny, K)`` slice to a one-slice ``(Nx, Ny, 1, K)`` volume."""
    x = np.asarray(x, dtype=np.float64)
    if x.ndim == 3:
        x = x[:, :, None, :]
    if x.ndim != 4:
        raise InvalidShapeError(f"expected an order-3 or order-4 tensor, got order {x.ndim}")
    if not np.all(np.isfinite(x)):
        raise InvalidInputError("input tensor contains NaN or Inf")
    if x.shape[-1] < 2:
        raise InvalidShapeError("need at least two snapshots")
    return x


def _thread_count():
    try:
        return max(1, int(os.environ.get(THREADS_ENV, "1")))
    except ValueError:
        raise ConfigurationError(f"{THREADS_ENV} must be an integer") from None


def _run(x, config, grid):
    max_iter = config.max_iter if config.iterative else 1
    return iterative_hodmd(x, config.d, config.eps_svd, config.eps_dmd, grid, max_iter)


def decompose_volume(volume, config=RunConfig()):
    """Decompose every slice, then the stack of reconstructed slices at once.

    The joint pass folds the slice axis into the second spatial direction,
    i.e. it decomposes an ``(Nx, Ny * I, K)`` tensor.
    """
    x = as_volume(volume)
    nx, ny, n_slices, k = x.shape
    grid = config.grid(k)

    with ThreadPoolExecutor(max_workers=_thread_count()) as pool:
        results = list(pool.map(lambda i: _run(x[:, :, i], config, grid), range(n_slices)))

    recon = np.stack([r.reconstruction.data for r in results], axis=2)
    joint = _run(recon.reshape(nx, ny * n_slices, k), config, grid)
    joint_exp = replace(joint.expansion, spatial_dims=(nx, ny, n_slices))
    return VolumeDecomposition(
        slice_expansions=[r.expansion for r in results],
        slice_iterations=[r.iterations for r in results],
        slice_converged=[r.converged for r in results],
        reconstruction=recon,
        joint_expansion=joint_exp,
        joint_reconstruction=joint.reconstruction.data.reshape(nx, ny, n_slices, k),
        joint_iterations=joint.iterations,
    )


def extend_volume(volume, total_frames, config=RunConfig()):
    """Decompose ``volume`` and evaluate the joint expansion on ``total_frames`` frames."""
    dec = decompose_volume(volume, config)
    ext = extend_frames(dec.joint_expansion, total_frames, config.growth_policy)
    return dec, np.array(ext.data)
