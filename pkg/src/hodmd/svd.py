"""Linear-algebra kernels: tolerance-truncated SVD, eigenpairs, least squares."""

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
import scipy.linalg

from .exceptions import DegenerateInputError, InvalidInputError, InvalidShapeError


@dataclass(frozen=True)
class TruncatedSvd:
    """``A ~= left_modes @ diag(singular_values) @ right_modes.T``.

    ``all_singular_values`` keeps the full spectrum so the truncation can be
    audited; ``discarded_energy`` is the Frobenius norm of what was cut.
    """

    left_modes: np.ndarray
    singular_values: np.ndarray
    right_modes: np.ndarray
    all_singular_values: np.ndarray

    @property
    def retained_rank(self):
        return self.singular_values.size

    @property
    def discarded_energy(self):
        tail = self.all_singular_values[self.retained_rank:]
        return float(np.sqrt(np.sum(tail * tail)))

    @property
    def tail_ratio(self):
        """First discarded singular value over the largest one (0 if none cut)."""
        s = self.all_singular_values
        if self.retained_rank >= s.size:
            return 0.0
        return float(s[self.retained_rank] / s[0])

    def reconstruct(self):
        return (self.left_modes * self.singular_values) @ self.right_modes.T


class EigenPairs(NamedTuple):
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


class LstsqSolution(NamedTuple):
    x: np.ndarray
    rank: int
    rank_deficient: bool


def retained_rank(singular_values, eps_svd):
    """Smallest ``N`` with ``s[N] / s[0] <= eps_svd``; full length if nothing is cut.

    Ratios exactly equal to ``eps_svd`` are cut.
    """
    s = np.asarray(singular_values, dtype=np.float64)
    if s.size == 0 or s[0] <= 0:
        return 0
    cut = np.flatnonzero(s / s[0] <= eps_svd)
    return int(cut[0]) if cut.size else int(s.size)


def _check_finite_matrix(a):
    a = np.asarray(a)
    if a.ndim != 2:
        raise InvalidShapeError(f"expected a matrix, got an array of order {a.ndim}")
    if not np.all(np.isfinite(a)):
        raise InvalidInputError("matrix contains NaN or Inf")
    return a


def truncated_svd(a, eps_svd):
    """Economy SVD of ``a`` truncated by the relative tolerance ``eps_svd``.

    Parameters
    ----------
    a : (J, K) array_like
        Real, finite, not identically zero.
    eps_svd : float
        Relative tolerance in ``(0, 1]``.  Singular values with
        ``sigma_n / sigma_1 <= eps_svd`` are dropped together with everything
        after them.

    Returns
    -------
    TruncatedSvd
        Each left singular vector is signed so that its largest-magnitude
        entry is nonnegative; the matching right vector is flipped with it.
    """
    a = _check_finite_matrix(np.asarray(a, dtype=np.float64))
    if not 0 < eps_svd <= 1:
        raise InvalidInputError(f"eps_svd must lie in (0, 1], got {eps_svd}")
    if not np.any(a):
        raise DegenerateInputError("cannot take the SVD of an all-zero matrix")

    try:
        u, s, vh = scipy.linalg.svd(a, full_matrices=False, lapack_driver="gesdd")
    except np.linalg.LinAlgError:
        u, s, vh = scipy.linalg.svd(a, full_matrices=False, lapack_driver="gesvd")

    n = retained_rank(s, eps_svd)
    u = u[:, :n]
    v = vh[:n].T
    pivot = np.argmax(np.abs(u), axis=0)
    signs = np.where(u[pivot, np.arange(n)] < 0, -1.0, 1.0)
    return TruncatedSvd(
        left_modes=u * signs,
        singular_values=s[:n].copy(),
        right_modes=v * signs,
        all_singular_values=s,
    )


def eigen_decompose(a):
    """All eigenpairs of a square matrix, eigenvectors scaled to unit 2-norm."""
    a = _check_finite_matrix(a)
    if a.shape[0] != a.shape[1]:
        raise InvalidShapeError(f"eigendecomposition needs a square matrix, got {a.shape}")
    mu, q = scipy.linalg.eig(a, check_finite=False)
    q = q / np.linalg.norm(q, axis=0)
    return EigenPairs(mu, q)


def least_squares_solve(a, b, rcond=None):
    """Minimise ``||a @ x - b||_2``; minimum-norm solution if ``a`` is rank deficient.

    ``rcond`` is the relative cutoff on singular values of ``a`` below which
    they are treated as zero (LAPACK default when ``None``).
    """
    a = _check_finite_matrix(a)
    b = np.asarray(b)
    if a.shape[0] < a.shape[1]:
        raise InvalidShapeError(
            f"least squares needs at least as many rows as columns, got {a.shape}"
        )
    if b.shape[0] != a.shape[0]:
        raise InvalidShapeError(f"right-hand side has {b.shape[0]} rows, expected {a.shape[0]}")
    x, _, rank, _ = scipy.linalg.lstsq(a, b, cond=rcond, check_finite=False,
                                       lapack_driver="gelsd")
    return LstsqSolution(x, int(rank), int(rank) < a.shape[1])
