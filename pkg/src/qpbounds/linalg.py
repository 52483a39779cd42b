"""Dense symmetric linear algebra used throughout the package.

Eigendecomposition, extreme eigenvalues, projection onto the PSD cone and
the scaled upper-triangle vectorization (svec) that the conic solver works
in.  Everything here is a pure function of its inputs; matrices are plain
float ndarrays of order up to a few dozen.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

SQRT2 = float(np.sqrt(2.0))


def check_symmetric(m, name: str = "matrix") -> np.ndarray:
    """Return the input as a square, finite, symmetric float array.

    Tiny asymmetry (below 1e-12 relative) is averaged away; anything larger
    is an input error.
    """
    a = np.asarray(m, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
        raise ValueError(f"{name} must be a square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError(f"{name} contains non-finite entries")
    gap = np.max(np.abs(a - a.T)) if a.size else 0.0
    if gap > 1e-12 * max(1.0, float(np.max(np.abs(a)))):
        raise ValueError(f"{name} is not symmetric (max asymmetry {gap:.3e})")
    return 0.5 * (a + a.T)


class EigDecomp(NamedTuple):
    """Eigenvalues sorted descending; orthonormal eigenvector columns."""

    values: np.ndarray
    vectors: np.ndarray


def eig_sym(m) -> EigDecomp:
    """Full eigendecomposition of a symmetric matrix.

    Eigenvalues come back sorted descending with matching columns.  Each
    column is sign-normalized so its first component larger than 1e-12 in
    magnitude is positive, which keeps outputs deterministic.
    """
    a = check_symmetric(m)
    w, v = np.linalg.eigh(a)
    w = w[::-1].copy()
    v = v[:, ::-1].copy()
    for col in range(v.shape[1]):
        nz = np.flatnonzero(np.abs(v[:, col]) > 1e-12)
        if nz.size and v[nz[0], col] < 0.0:
            v[:, col] = -v[:, col]
    return EigDecomp(w, v)


def lambda_max(m) -> float:
    """Largest eigenvalue of a symmetric matrix."""
    return float(eig_sym(m).values[0])


def project_psd(m) -> np.ndarray:
    """Frobenius-nearest positive semidefinite matrix (eigenvalues clipped at 0)."""
    a = check_symmetric(m)
    w, v = np.linalg.eigh(a)
    p = (v * np.maximum(w, 0.0)) @ v.T
    return 0.5 * (p + p.T)


def svec_length(order: int) -> int:
    return order * (order + 1) // 2


def svec(m) -> np.ndarray:
    """Scaled upper-triangle vectorization.

    Off-diagonal slots carry weight sqrt(2) so that svec(A) @ svec(B) equals
    the matrix inner product trace(A B) exactly.
    """
    a = check_symmetric(m)
    iu = np.triu_indices(a.shape[0])
    out = a[iu].copy()
    out[iu[0] != iu[1]] *= SQRT2
    return out


def smat(vec, order: int) -> np.ndarray:
    """Inverse of :func:`svec` for a matrix of the given order."""
    v = np.asarray(vec, dtype=float)
    want = svec_length(order)
    if v.shape != (want,):
        raise ValueError(f"svec vector for order {order} must have length {want}, got {v.shape}")
    iu = np.triu_indices(order)
    vals = v.copy()
    vals[iu[0] != iu[1]] /= SQRT2
    a = np.zeros((order, order))
    a[iu] = vals
    a.T[iu] = vals
    return a
