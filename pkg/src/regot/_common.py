"""Shared helpers: array coercion and numeric floors."""

import numpy as np

# Entries below this are treated as exact zeros in entropy/KL support checks.
ZERO_FLOOR = 1e-300


def as_vector(x):
    """Return ``x`` as a 1-D float64 array, unwrapping ``.values`` if present."""
    if hasattr(x, "values"):
        x = x.values
    v = np.asarray(x, dtype=np.float64)
    if v.ndim != 1:
        raise ValueError(f"expected a 1-D vector, got shape {v.shape}")
    return v


def as_matrix(x):
    """Return ``x`` as a 2-D float64 array, unwrapping ``.entries`` if present."""
    if hasattr(x, "entries"):
        x = x.entries
    a = np.asarray(x, dtype=np.float64)
    if a.ndim != 2:
        raise ValueError(f"expected a 2-D matrix, got shape {a.shape}")
    return a
