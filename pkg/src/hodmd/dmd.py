"""Higher-order DMD (DMD-d).

The pipeline is ``reduce -> fit_koopman -> extract_modes``.  Data enter as a
``J x K`` snapshot matrix sampled on a uniform :class:`~hodmd.tensor.TimeGrid`
and leave as a :class:`DmdExpansion`, the modal sum

    v(t) = Re sum_m a_m u_m exp((delta_m + i omega_m) t)

which can be evaluated on any time grid.
"""

import warnings
from dataclasses import dataclass, field, replace

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from . import svd as _svd
from ._validation import check_delay, check_snapshots, check_tolerance
from .exceptions import InvalidShapeError, WindowError
from .tensor import SnapshotTensor, TimeGrid, as_snapshot_matrix, from_snapshot_matrix

#: Relative singular-value cutoff of the pseudo-inverse in the Koopman fit.
KOOPMAN_RCOND = 1e-10


@dataclass(frozen=True)
class DmdMode:
    amplitude: float
    growth_rate: float
    angular_frequency: float
    spatial_mode: np.ndarray

    @property
    def freq_bpm(self):
        return self.angular_frequency * 60.0 / (2.0 * np.pi)


@dataclass(frozen=True)
class ReducedSnapshots:
    """Reduced snapshot matrix ``reduced = diag(s) T^T`` and the basis ``W`` lifting it."""

    reduced: np.ndarray
    basis: np.ndarray
    svd: _svd.TruncatedSvd

    @property
    def rank(self):
        return self.reduced.shape[0]


@dataclass(frozen=True)
class ModifiedKoopman:
    """Block companion matrix built from the delay operators ``R_1 .. R_d``.

    ``blocks[j]`` multiplies the snapshot ``d - j`` steps in the past, so the
    last block row of :attr:`matrix` is ``[R_1 ... R_d]`` and the rows above
    it shift the delay window by one snapshot.
    """

    blocks: tuple
    residual: float = 0.0

    @property
    def d(self):
        return len(self.blocks)

    @property
    def n(self):
        return self.blocks[0].shape[0]

    @property
    def matrix(self):
        n, d = self.n, self.d
        out = np.zeros((n * d, n * d))
        out[: n * (d - 1), n:] = np.eye(n * (d - 1))
        out[n * (d - 1):] = np.hstack(self.blocks)
        return out


@dataclass(frozen=True)
class DmdExpansion:
    """Truncated DMD expansion, modes sorted by decreasing amplitude.

    ``spatial_modes`` holds one unit-norm complex column per mode with the
    phase of the fitted amplitude absorbed, so ``amplitudes`` are real and
    nonnegative.
    """

    amplitudes: np.ndarray
    growth_rates: np.ndarray
    frequencies: np.ndarray
    spatial_modes: np.ndarray
    time_grid: TimeGrid
    spatial_dims: tuple
    d: int = 1
    eps_svd: float = 5e-4
    eps_dmd: float = 5e-4
    svd_rank: int = 0
    dropped_modes: int = field(default=0, compare=False)

    def __len__(self):
        return self.amplitudes.size

    @property
    def n_modes(self):
        return self.amplitudes.size

    @property
    def eigenvalues(self):
        """Continuous-time eigenvalues ``delta + i omega``."""
        return self.growth_rates + 1j * self.frequencies

    @property
    def freq_bpm(self):
        return self.frequencies * 60.0 / (2.0 * np.pi)

    @property
    def modes(self):
        return [
            DmdMode(float(a), float(g), float(w), self.spatial_modes[:, m])
            for m, (a, g, w) in enumerate(zip(self.amplitudes, self.growth_rates,
                                              self.frequencies))
        ]

    def leading_frequency(self, min_omega=1e-8):
        """Absolute angular frequency of the largest-amplitude oscillating mode."""
        osc = np.flatnonzero(np.abs(self.frequencies) > min_omega)
        if osc.size == 0:
            return 0.0
        return float(abs(self.frequencies[osc[0]]))

    def with_zero_growth(self):
        return replace(self, growth_rates=np.zeros_like(self.growth_rates))

    def evaluate(self, times):
        """Real part of the expansion at ``times``; shape ``(J, len(times))``.

        Modes are accumulated one at a time with elementwise products, so the
        value at a given time does not depend on which other times are
        requested.
        """
        times = np.asarray(times, dtype=np.float64)
        out = np.zeros((self.spatial_modes.shape[0], times.size))
        for m in range(self.n_modes):
            c = self.amplitudes[m] * self.spatial_modes[:, m]
            e = np.exp((self.growth_rates[m] + 1j * self.frequencies[m]) * times)
            out += np.outer(c.real, e.real)
            out -= np.outer(c.imag, e.imag)
        return out

    def evaluate_complex(self, times):
        times = np.asarray(times, dtype=np.float64)
        vander = np.exp(np.outer(self.eigenvalues, times))
        return (self.spatial_modes * self.amplitudes) @ vander

    def reconstruct(self, grid=None):
        """Evaluate on ``grid`` (default: the training grid) as a :class:`SnapshotTensor`."""
        grid = self.time_grid if grid is None else grid
        matrix = self.evaluate(grid.times)
        return from_snapshot_matrix(matrix, self.spatial_dims, dt=grid.dt)


def reduce(snapshots, eps_svd):
    """Project the ``J x K`` snapshot matrix onto its truncated left singular basis."""
    v = check_snapshots(snapshots)
    check_tolerance(eps_svd, "eps_svd")
    t = _svd.truncated_svd(v, eps_svd)
    return ReducedSnapshots(reduced=t.singular_values[:, None] * t.right_modes.T,
                            basis=t.left_modes, svd=t)


def delay_embed(reduced, d):
    """Stack ``d`` consecutive reduced snapshots per column (oldest block first)."""
    n, k = reduced.shape
    cols = k - d + 1
    return np.vstack([reduced[:, j:j + cols] for j in range(d)])


def fit_koopman(reduced, d, rcond=KOOPMAN_RCOND):
    """Jointly fit ``R_1 .. R_d`` in ``v_{k+d} ~= sum_j R_j v_{k+j-1}``.

    All ``K - d`` sliding windows enter one least-squares problem, solved with
    a pseudo-inverse that drops singular values of the delayed data below
    ``rcond`` times the largest (minimum-norm solution when underdetermined).
    """
    reduced = np.asarray(reduced, dtype=np.float64)
    if reduced.ndim != 2:
        raise InvalidShapeError("reduced snapshots must form a matrix")
    n, k = reduced.shape
    d = check_delay(d)
    if d >= k:
        raise WindowError(f"delay index d={d} needs more than {d} snapshots, got K={k}")

    past = delay_embed(reduced[:, :-1], d)      # (d n) x (K - d)
    future = reduced[:, d:]                     # n x (K - d)
    u, s, vh = np.linalg.svd(past, full_matrices=False)
    keep = s > rcond * s[0] if s.size and s[0] > 0 else np.zeros(s.shape, bool)
    pinv = (vh[keep].T / s[keep]) @ u[:, keep].T
    ops = future @ pinv
    resid = np.linalg.norm(future - ops @ past)
    scale = np.linalg.norm(future)
    return ModifiedKoopman(
        blocks=tuple(ops[:, j * n:(j + 1) * n].copy() for j in range(d)),
        residual=float(resid / scale) if scale > 0 else 0.0,
    )


def _conjugate_partner(lam, candidates):
    dist = np.abs(candidates - np.conj(lam))
    j = int(np.argmin(dist))
    return j, dist[j]


def extract_modes(koopman, basis, reduced, grid, eps_dmd, spatial_dims=None,
                  eps_svd=None):
    """Eigen-decompose the modified Koopman matrix and fit amplitudes.

    Parameters
    ----------
    koopman : ModifiedKoopman
    basis : (J, N) ndarray
        Lifts reduced vectors to physical space (need not be orthonormal).
    reduced : (N, K) ndarray
        Reduced snapshots the amplitudes are fitted to.
    grid : TimeGrid
        Sampling times of ``reduced``; ``grid.count`` must equal ``K``.
    eps_dmd : float
        Modes with ``a_m / a_1 <= eps_dmd`` are discarded.
    """
    reduced = np.asarray(reduced)
    basis = np.asarray(basis)
    n, k = reduced.shape
    if grid.count != k:
        raise InvalidShapeError(f"time grid has {grid.count} points but data have {k} snapshots")
    check_tolerance(eps_dmd, "eps_dmd")
    if spatial_dims is None:
        spatial_dims = (basis.shape[0],)

    mu, q = _svd.eigen_decompose(koopman.matrix)
    with np.errstate(divide="ignore", invalid="ignore"):
        lam = np.log(mu.astype(complex)) / grid.dt
    ok = (np.abs(mu) > 0) & np.isfinite(lam)
    dropped = int(np.count_nonzero(~ok))
    if dropped:
        warnings.warn(f"discarding {dropped} DMD eigenvalue(s) with undefined logarithm",
                      RuntimeWarning, stacklevel=2)
    lam, x = lam[ok], q[:n, ok]

    lifted = basis @ x
    norms = np.linalg.norm(lifted, axis=0)
    live = norms > 0
    lam, x, lifted, norms = lam[live], x[:, live], lifted[:, live], norms[live]
    x = x / norms
    lifted = lifted / norms

    # v_k ~= sum_m b_m x_m exp(lam_m t_k), stacked over all K snapshots
    vander = np.exp(np.outer(grid.times, lam))                  # K x M
    system = (vander[:, None, :] * x[None, :, :]).reshape(k * n, -1)
    rhs = reduced.T.reshape(-1).astype(complex)
    b = _svd.least_squares_solve(system, rhs).x

    amp = np.abs(b)
    phase = np.where(amp > 0, b / np.where(amp > 0, amp, 1.0), 1.0)
    modes = lifted * phase

    order = np.argsort(-amp, kind="stable")
    amp, lam, modes = amp[order], lam[order], modes[:, order]
    if amp.size == 0 or amp[0] == 0:
        keep = np.zeros(amp.shape, bool)
    else:
        keep = amp / amp[0] > eps_dmd
        # never split a conjugate pair across the truncation boundary
        for m in np.flatnonzero(keep):
            if lam[m].imag != 0:
                j, dist = _conjugate_partner(lam[m], lam)
                if dist <= 1e-6 * abs(lam[m]) and amp[j] > 0:
                    keep[j] = True

    return DmdExpansion(
        amplitudes=amp[keep],
        growth_rates=lam[keep].real.copy(),
        frequencies=lam[keep].imag.copy(),
        spatial_modes=np.ascontiguousarray(modes[:, keep]),
        time_grid=grid,
        spatial_dims=tuple(spatial_dims),
        d=koopman.d,
        eps_svd=eps_svd if eps_svd is not None else float("nan"),
        eps_dmd=eps_dmd,
        svd_rank=n,
        dropped_modes=dropped,
    )


def reconstruct(expansion, grid=None):
    return expansion.reconstruct(grid)


def hodmd(snapshots, d=2, eps_svd=5e-4, eps_dmd=5e-4, grid=None, spatial_dims=None):
    """Run DMD-d on a snapshot matrix (or :class:`SnapshotTensor`).

    ``grid`` defaults to the tensor's own grid, or ``dt = 8e-3`` starting at 0.
    """
    if isinstance(snapshots, SnapshotTensor):
        spatial_dims = snapshots.spatial_dims if spatial_dims is None else spatial_dims
        grid = snapshots.grid if grid is None else grid
        snapshots = as_snapshot_matrix(snapshots)
    v = check_snapshots(snapshots)
    if grid is None:
        grid = TimeGrid(dt=8e-3, count=v.shape[1])
    red = reduce(v, eps_svd)
    koop = fit_koopman(red.reduced, d)
    return extract_modes(koop, red.basis, red.reduced, grid, eps_dmd,
                         spatial_dims=spatial_dims, eps_svd=eps_svd)


class HODMD(BaseEstimator):
    """Higher-order DMD estimator.

    Parameters
    ----------
    d : int, default=2
        Number of delayed snapshots in each Koopman window.
    eps_svd : float, default=5e-4
        Relative singular-value tolerance of the dimensionality reduction.
    eps_dmd : float, default=5e-4
        Relative amplitude tolerance for keeping DMD modes.
    dt : float, default=8e-3
        Time step between snapshots, in seconds.
    t0 : float, default=0.0
        Time of the first snapshot.

    Attributes
    ----------
    expansion_ : DmdExpansion
    n_svd_modes_ : int
    frequencies_, growth_rates_, amplitudes_ : ndarray
    """

    def __init__(self, d=2, eps_svd=5e-4, eps_dmd=5e-4, dt=8e-3, t0=0.0):
        self.d = d
        self.eps_svd = eps_svd
        self.eps_dmd = eps_dmd
        self.dt = dt
        self.t0 = t0

    def fit(self, X, y=None):
        """Fit on ``X`` with snapshots along the last axis."""
        data = np.asarray(X, dtype=np.float64)
        if data.ndim < 2:
            raise InvalidShapeError("X needs at least one spatial axis and a time axis")
        grid = TimeGrid(dt=self.dt, count=data.shape[-1], t0=self.t0)
        self.expansion_ = hodmd(as_snapshot_matrix(data), d=self.d, eps_svd=self.eps_svd,
                                eps_dmd=self.eps_dmd, grid=grid,
                                spatial_dims=data.shape[:-1])
        self._set_summary()
        return self

    def _set_summary(self):
        exp = self.expansion_
        self.n_svd_modes_ = exp.svd_rank
        self.n_modes_ = exp.n_modes
        self.frequencies_ = exp.frequencies
        self.growth_rates_ = exp.growth_rates
        self.amplitudes_ = exp.amplitudes

    def predict(self, times):
        """Evaluate the fitted expansion at arbitrary ``times`` (seconds)."""
        check_is_fitted(self, "expansion_")
        times = np.atleast_1d(np.asarray(times, dtype=np.float64))
        out = self.expansion_.evaluate(times)
        return out.reshape(tuple(self.expansion_.spatial_dims) + (times.size,))

    def reconstruct(self, n_frames=None):
        """Evaluate on ``n_frames`` uniformly spaced snapshots from ``t0``."""
        check_is_fitted(self, "expansion_")
        grid = self.expansion_.time_grid
        if n_frames is not None:
            grid = grid.with_count(n_frames)
        return self.predict(grid.times)
