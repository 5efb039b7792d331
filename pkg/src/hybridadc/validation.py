"""Input checks for the estimator API (complex-valued, unlike sklearn's)."""

import numbers

import numpy as np

from .channel import ChannelRealization
from .exceptions import InvalidInputError
from .numerics import as_matrix


def check_channel(x):
    """Return a ChannelRealization for a matrix or an existing realization."""
    if isinstance(x, ChannelRealization):
        return x
    return ChannelRealization.from_matrix(as_matrix(x, "H"))


def check_received(y, n_features):
    """Validate received snapshots as an ``(n_samples, n_features)`` array.

    A 1-D input is treated as a single snapshot.
    """
    y = np.asarray(y)
    if y.ndim == 1:
        y = y[None, :]
    y = as_matrix(y, "Y")
    if y.shape[1] != n_features:
        raise InvalidInputError(f"Y has {y.shape[1]} features, the combiner expects {n_features}")
    return y


def check_scalar(value, name, target_type=numbers.Real, min_val=None, max_val=None, include_min=True):
    if not isinstance(value, target_type) or isinstance(value, bool):
        raise InvalidInputError(f"{name} must be {target_type.__name__}, got {type(value).__name__}")
    if min_val is not None and (value < min_val or (not include_min and value == min_val)):
        raise InvalidInputError(f"{name}={value} is below its minimum {min_val}")
    if max_val is not None and value > max_val:
        raise InvalidInputError(f"{name}={value} exceeds its maximum {max_val}")
    return value
