"""Higher-order DMD, HOSVD denoising, slice repair and modal time extrapolation
for spatio-temporal image stacks."""

from .dmd import HODMD, DmdExpansion, DmdMode, extract_modes, fit_koopman, hodmd, reconstruct, \
    reduce
from .hosvd import HosvdFactors, MultidimHODMD, hosvd_factorize, iterative_hodmd, multidim_hodmd, rescale
from .phantom import PhantomSpec, make_phantom
from .pipeline import RunConfig, decompose_volume, extend_volume
from .repair import SCHEMES, RepairReport, SliceRepairer, interpolate_frame, repair_slice, rrmse
from .rom import ExtensionSpec, extend, extend_frames
from .svd import eigen_decompose, least_squares_solve, truncated_svd
from .tensor import SnapshotTensor, TimeGrid, as_snapshot_matrix, frobenius_norm, \
    from_snapshot_matrix, refold, unfold

__version__ = "0.1.0"
