"""Probability simplex geometry: softmax, its Jacobian and tangent bases."""

import numpy as np

from .errors import DomainError

SIMPLEX_TOL = 1e-12


def _as_finite_vector(v, name="v"):
    v = np.asarray(v, dtype=float)
    if v.ndim != 1:
        raise DomainError(f"{name} must be a 1-D vector, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise DomainError(f"{name} has non-finite entries: {v}")
    return v


def as_simplex_point(x, tol=1e-9):
    """Validate ``x`` as a point of the simplex and renormalize it.

    Entries may be off by ``tol`` (negative or in the sum); anything worse is
    rejected.
    """
    x = _as_finite_vector(x, "x")
    if x.size < 2:
        raise DomainError("simplex points need at least 2 entries")
    if np.any(x < -tol) or abs(x.sum() - 1.0) > tol:
        raise DomainError(f"not a point of the simplex: {x}")
    x = np.clip(x, 0.0, None)
    return x / x.sum()


def softmax(v):
    """Map a score vector to the interior of the simplex.

    Evaluated with the maximum subtracted, which is exact by shift invariance
    and keeps ``exp`` from overflowing.
    """
    v = _as_finite_vector(v)
    if v.size < 2:
        raise DomainError("softmax needs at least 2 entries")
    w = np.exp(v - v.max())
    return w / w.sum()


def softmax_jacobian(v):
    """Jacobian ``diag(x) - x x^T`` of softmax at ``v``, with ``x = softmax(v)``."""
    x = softmax(v)
    return choice_jacobian(x)


def choice_jacobian(x):
    """``diag(x) - x x^T`` for a strategy ``x`` already on the simplex."""
    x = np.asarray(x, dtype=float)
    return np.diag(x) - np.outer(x, x)


def tangent_basis(n):
    """Orthonormal basis of the zero-sum subspace of R^n, as an n x (n-1) matrix.

    Columns 2..n of the Householder reflector that sends e_1 to 1/sqrt(n).
    The construction is deterministic, so repeated calls agree bit for bit.
    """
    if int(n) != n or n < 2:
        raise DomainError(f"tangent basis needs integer n >= 2, got {n}")
    n = int(n)
    u = np.full(n, 1.0 / np.sqrt(n))
    v = -u
    v[0] += 1.0
    H = np.eye(n) - 2.0 * np.outer(v, v) / (v @ v)
    return H[:, 1:].copy()


def project_zero_mean(v):
    """Remove the mean of ``v``; softmax does not see the difference."""
    v = np.asarray(v, dtype=float)
    return v - v.mean()


def dirichlet_interior(n, size, rng):
    """``size`` uniform samples from the simplex, kept strictly interior."""
    x = rng.dirichlet(np.ones(n), size=size)
    x = np.clip(x, 1e-12, None)
    return x / x.sum(axis=1, keepdims=True)
