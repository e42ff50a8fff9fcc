"""Argument checks shared by the public functions and estimators."""

import numbers

import numpy as np

from .exceptions import ConfigurationError, InvalidInputError, InvalidShapeError


def check_tolerance(value, name):
    if not isinstance(value, numbers.Real) or not 0 < value <= 1:
        raise ConfigurationError(f"{name} must be a real number in (0, 1], got {value!r}")
    return float(value)


def check_delay(d):
    if isinstance(d, bool) or not isinstance(d, numbers.Integral) or d < 1:
        raise ConfigurationError(f"delay index d must be an integer >= 1, got {d!r}")
    return int(d)


def check_snapshots(v, min_snapshots=2):
    v = np.asarray(v, dtype=np.float64)
    if v.ndim != 2:
        raise InvalidShapeError(f"snapshot matrix must be 2-D, got order {v.ndim}")
    if v.shape[1] < min_snapshots:
        raise InvalidShapeError(f"need at least {min_snapshots} snapshots, got {v.shape[1]}")
    if not np.all(np.isfinite(v)):
        raise InvalidInputError("snapshot matrix contains NaN or Inf")
    return v


def check_tensor(x, ndim):
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != ndim:
        raise InvalidShapeError(f"expected an order-{ndim} tensor, got order {x.ndim}")
    if not np.all(np.isfinite(x)):
        raise InvalidInputError("tensor contains NaN or Inf")
    return x
