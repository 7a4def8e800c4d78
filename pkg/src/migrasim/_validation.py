"""Input validation shared by the core functions and the estimator wrappers."""

import numpy as np
from sklearn.utils.validation import check_array


class ParameterError(ValueError):
    """Invalid parameter value; ``field`` names the offending parameter."""

    def __init__(self, field, message):
        super().__init__(message)
        self.field = field


def check_weight_matrix(W, min_vertices=2):
    """Return a float copy of ``W`` after checking it is a valid weight matrix.

    Square, finite, nonnegative, zero diagonal, at least ``min_vertices`` rows.
    """
    W = check_array(W, dtype=np.float64, ensure_min_samples=1, copy=True)
    if W.shape[0] != W.shape[1]:
        raise ValueError(f"weight matrix must be square, got shape {W.shape}")
    if W.shape[0] < min_vertices:
        raise ValueError(f"graph needs at least {min_vertices} vertices, got {W.shape[0]}")
    if (W < 0).any():
        raise ValueError("arc weights must be nonnegative")
    if np.any(np.diag(W) != 0):
        raise ValueError("self-loops are not allowed: diagonal of W must be zero")
    return W


def check_state(x, n=None):
    """Intention vector as a 1-d float array of finite entries."""
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 1:
        raise ValueError(f"intention state must be 1-d, got shape {x.shape}")
    if not np.all(np.isfinite(x)):
        raise ValueError("intention state contains non-finite entries")
    if n is not None and x.shape[0] != n:
        raise ValueError(f"intention state has length {x.shape[0]}, graph has {n} vertices")
    return x


def check_positive(name, value, allow_zero=False):
    if isinstance(value, bool) or not isinstance(value, (int, float, np.number)):
        raise ParameterError(name, f"{name} must be a number, got {value!r}")
    ok = value >= 0 if allow_zero else value > 0
    if not np.isfinite(value) or not ok:
        bound = ">= 0" if allow_zero else "> 0"
        raise ParameterError(name, f"{name} must be {bound}, got {value!r}")
    return value
