"""Input validation helpers shared across the package.

All validators return canonical ``float64`` numpy arrays (C-contiguous) so the
numerical code downstream never has to defend against lists, integer dtypes or
Fortran layouts.  Errors are raised as :class:`ValueError` with the offending
argument named, in the spirit of scikit-learn's ``check_array``.
"""

from __future__ import annotations

import numpy as np

MAX_SEED = 2**64

#: absolute symmetry tolerance for SPD checks, relative to the matrix scale
SYMMETRY_TOL = 1e-10


def as_rng(seed):
    """Return a ``numpy.random.Generator`` from an integer seed or a Generator.

    Identical integer seeds yield bit-identical sample streams.
    """
    if isinstance(seed, np.random.Generator):
        return seed
    if isinstance(seed, np.random.SeedSequence):
        return np.random.default_rng(seed)
    return np.random.default_rng(check_seed(seed))


def check_seed(seed):
    """Validate a 64-bit unsigned integer seed."""
    if isinstance(seed, (bool, float)):
        raise ValueError(f"seed must be an integer, got {seed!r}")
    seed = int(seed)
    if not 0 <= seed < MAX_SEED:
        raise ValueError(f"seed must lie in [0, 2**64), got {seed}")
    return seed


def check_vector(v, name="vector", min_size=1):
    v = np.asarray(v, dtype=float)
    if v.ndim != 1:
        raise ValueError(f"{name} must be 1-dimensional, got shape {v.shape}")
    if v.size < min_size:
        raise ValueError(f"{name} must have at least {min_size} entries")
    if not np.all(np.isfinite(v)):
        raise ValueError(f"{name} contains non-finite entries")
    return np.ascontiguousarray(v)


def check_matrix(a, name="matrix"):
    a = np.asarray(a, dtype=float)
    if a.ndim != 2:
        raise ValueError(f"{name} must be 2-dimensional, got shape {a.shape}")
    if a.shape[0] < 1 or a.shape[1] < 1:
        raise ValueError(f"{name} must have positive dimensions, got {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError(f"{name} contains non-finite entries")
    return np.ascontiguousarray(a)


def check_spd(a, name="matrix"):
    """Validate a symmetric positive-definite matrix.

    Symmetry is required up to ``SYMMETRY_TOL`` (scaled by the matrix
    magnitude); positive definiteness is established by a Cholesky
    factorisation, which is also the factorisation used downstream.
    """
    a = check_matrix(a, name)
    if a.shape[0] != a.shape[1]:
        raise ValueError(f"{name} must be square, got {a.shape}")
    scale = max(1.0, float(np.abs(a).max()))
    if float(np.abs(a - a.T).max()) > SYMMETRY_TOL * scale:
        raise ValueError(f"{name} is not symmetric within tolerance")
    try:
        np.linalg.cholesky(a)
    except np.linalg.LinAlgError as exc:
        raise ValueError(f"{name} is not positive definite") from exc
    return a


def check_returns(X, name="returns", min_rows=1):
    """Validate an (n, d) matrix of asset returns."""
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    X = check_matrix(X, name)
    if X.shape[0] < min_rows:
        raise ValueError(f"{name} needs at least {min_rows} rows, got {X.shape[0]}")
    return X


def check_weights(w, d=None, name="weights"):
    w = check_vector(w, name)
    if d is not None and w.size != d:
        raise ValueError(f"{name} must have length {d}, got {w.size}")
    return w
