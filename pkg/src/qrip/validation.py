"""Input validation helpers in the spirit of ``sklearn.utils.validation``."""

from __future__ import annotations

import numbers

import numpy as np

from .exceptions import DimensionError, ParameterError
from .quaternion import as_quaternion_array


def check_matrix(Phi) -> np.ndarray:
    """Return ``Phi`` as a finite ``(m, n, 4)`` quaternion array."""
    Phi = as_quaternion_array(Phi, 2)
    if Phi.shape[0] < 1 or Phi.shape[1] < 1:
        raise DimensionError(f"matrix must be non-empty, got shape {Phi.shape[:2]}")
    if not np.all(np.isfinite(Phi)):
        raise ParameterError("matrix contains NaN or infinity")
    return Phi


def check_vectors(X, n: int | None = None) -> np.ndarray:
    """Return a batch of vectors as a ``(V, n, 4)`` quaternion array.

    ``X`` is either ``(V, n)`` (real vectors) or ``(V, n, 4)``.
    """
    X = as_quaternion_array(X, 2)
    if n is not None and X.shape[1] != n:
        raise DimensionError(f"vectors have length {X.shape[1]}, expected {n}")
    if not np.all(np.isfinite(X)):
        raise ParameterError("vectors contain NaN or infinity")
    return X


def check_count(value, name: str, minimum: int = 1) -> int:
    if isinstance(value, bool) or not isinstance(value, numbers.Integral) or value < minimum:
        raise ParameterError(f"{name} must be an integer >= {minimum}, got {value!r}")
    return int(value)


def check_support(support, n: int) -> tuple:
    """Sorted, duplicate-free tuple of indices in ``range(n)``."""
    idx = sorted(int(i) for i in support)
    if len(set(idx)) != len(idx):
        raise ParameterError(f"support has repeated indices: {idx}")
    if not idx:
        raise ParameterError("support must be nonempty")
    if idx[0] < 0 or idx[-1] >= n:
        raise DimensionError(f"support {idx} not within 0..{n - 1}")
    return tuple(idx)
