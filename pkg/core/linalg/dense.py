"""
Dense Linear Algebra - small vector/matrix kernel used by every other module

Dimensions stay below a few hundred (reduced-order models and small spring
networks), so storage is always dense numpy and factorizations come from
scipy.linalg.
"""

import numpy as np
import scipy.linalg as la
from numpy.typing import ArrayLike, NDArray

from core.constants import PIVOT_TOL
from core.errors import DimensionMismatchError, NotSPDError, SingularMatrixError

# Aliases used in signatures throughout the package
Vec = NDArray[np.float64]
SymMat = NDArray[np.float64]


def as_vec(values: ArrayLike, dim: "int | None" = None) -> Vec:
    """Convert to a finite 1D float vector, optionally checking its dimension"""
    vec = np.asarray(values, dtype=float)
    if vec.ndim == 0:
        vec = vec.reshape(1)
    if vec.ndim != 1 or vec.size == 0:
        raise DimensionMismatchError(f"Expected a non-empty vector, got shape {vec.shape}")
    if dim is not None and vec.size != dim:
        raise DimensionMismatchError(f"Expected dimension {dim}, got {vec.size}")
    if not np.all(np.isfinite(vec)):
        raise ValueError("Vector has non-finite entries")
    return vec


def as_symmat(values: ArrayLike, dim: "int | None" = None, require_spd: bool = False) -> SymMat:
    """
    Build a symmetric matrix.

    The input is symmetrized as 0.5 * (A + A^T), so the result is symmetric
    by construction. Scalars and 1x1 inputs become 1x1 matrices.
    """
    mat = np.atleast_2d(np.asarray(values, dtype=float))
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise DimensionMismatchError(f"Expected a square matrix, got shape {mat.shape}")
    if dim is not None and mat.shape[0] != dim:
        raise DimensionMismatchError(f"Expected a {dim}x{dim} matrix, got {mat.shape}")
    if not np.all(np.isfinite(mat)):
        raise ValueError("Matrix has non-finite entries")
    mat = 0.5 * (mat + mat.T)
    if require_spd and not is_spd(mat):
        raise NotSPDError("Matrix is not symmetric positive definite")
    return mat


def is_spd(mat: SymMat) -> bool:
    """Check positive definiteness through an attempted Cholesky factorization"""
    try:
        la.cho_factor(mat, check_finite=True)
        return True
    except la.LinAlgError:
        return False


def is_psd(mat: SymMat, tol: float = 1e-12) -> bool:
    """Check positive semi-definiteness through the smallest eigenvalue"""
    eigenvalues = np.linalg.eigvalsh(mat)
    scale = max(1.0, float(np.max(np.abs(eigenvalues))))
    return bool(eigenvalues[0] >= -tol * scale)


def solve_spd(A: SymMat, b: Vec) -> Vec:
    """
    Solve A x = b for symmetric positive definite A by Cholesky.

    Raises:
        NotSPDError: if a pivot is not positive during factorization
        DimensionMismatchError: if shapes disagree
    """
    A = np.asarray(A, dtype=float)
    b = np.asarray(b, dtype=float)
    _check_system(A, b)
    try:
        factor = la.cho_factor(A)
    except la.LinAlgError as e:
        raise NotSPDError(f"Cholesky failed: {e}") from e
    return la.cho_solve(factor, b)


def solve_general(A: NDArray[np.float64], b: Vec) -> Vec:
    """
    Solve A x = b for a general square A by partial-pivot LU.

    Raises:
        SingularMatrixError: if a pivot is below PIVOT_TOL times the row scale
        DimensionMismatchError: if shapes disagree
    """
    A = np.asarray(A, dtype=float)
    b = np.asarray(b, dtype=float)
    _check_system(A, b)

    row_scale = np.max(np.abs(A), axis=1)
    if np.any(row_scale == 0.0):
        raise SingularMatrixError("Matrix has a zero row")

    lu, piv = la.lu_factor(A, check_finite=True)
    pivots = np.abs(np.diag(lu))
    if np.any(pivots < PIVOT_TOL * np.max(row_scale)):
        raise SingularMatrixError(f"Pivot {pivots.min():.3e} below tolerance")
    return la.lu_solve((lu, piv), b)


def weighted_norm_sq(x: Vec, W: SymMat) -> float:
    """Return x^T W x"""
    x = np.asarray(x, dtype=float)
    W = np.atleast_2d(np.asarray(W, dtype=float))
    if W.shape != (x.size, x.size):
        raise DimensionMismatchError(f"Weight {W.shape} does not match vector of size {x.size}")
    return float(x @ W @ x)


def _check_system(A: NDArray[np.float64], b: Vec):
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise DimensionMismatchError(f"Expected a square matrix, got shape {A.shape}")
    if b.shape[0] != A.shape[0]:
        raise DimensionMismatchError(f"Right-hand side of size {b.shape[0]} for a {A.shape[0]}x{A.shape[0]} matrix")
