"""Dense complex linear algebra used throughout the library.

Thin, contract-checked wrappers around LAPACK-backed routines: matrices and
vectors are plain ``numpy`` arrays, validated on entry.  All functions are pure
and safe to call concurrently.
"""

from __future__ import annotations

import numpy as np
import scipy.linalg

__all__ = [
    "DimensionError",
    "NumericalError",
    "as_matrix",
    "as_vector",
    "adjoint",
    "commutator",
    "frobenius",
    "solve",
    "expm",
    "eig_general",
    "eig_symmetric",
]

#: Default condition-number bound above which `solve` refuses to proceed.
DEFAULT_COND_LIMIT = 1e12

#: Default tolerance for the symmetry check in `eig_symmetric`.
DEFAULT_SYMMETRY_TOL = 1e-12


class DimensionError(ValueError):
    """Non-conforming or non-square input."""


class NumericalError(RuntimeError):
    """Numerically singular solve or failed iteration; carries diagnostics."""

    def __init__(self, message: str, condition: float | None = None):
        super().__init__(message)
        self.condition = condition


def as_matrix(m, square: bool = False) -> np.ndarray:
    """Validate and return ``m`` as a 2-D complex array with finite entries."""
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2:
        raise DimensionError(f"expected a matrix, got ndim={a.ndim}")
    if not np.all(np.isfinite(a.view(float))):
        raise ValueError("matrix has non-finite entries")
    if square and a.shape[0] != a.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {a.shape}")
    return a


def as_vector(v) -> np.ndarray:
    """Validate and return ``v`` as a 1-D complex array with finite entries."""
    a = np.asarray(v, dtype=complex)
    if a.ndim != 1:
        raise DimensionError(f"expected a vector, got ndim={a.ndim}")
    if not np.all(np.isfinite(a.view(float))):
        raise ValueError("vector has non-finite entries")
    return a


def adjoint(m) -> np.ndarray:
    """Conjugate transpose."""
    return as_matrix(m).conj().T


def commutator(m, n) -> np.ndarray:
    """[M, N] = MN - NM."""
    a, b = as_matrix(m, square=True), as_matrix(n, square=True)
    if a.shape != b.shape:
        raise DimensionError(f"shape mismatch {a.shape} vs {b.shape}")
    return a @ b - b @ a

def frobenius(m) -> float:
    """Frobenius norm."""
    return float(np.linalg.norm(np.asarray(m, dtype=complex), "fro"))


def solve(m, rhs, cond_limit: float = DEFAULT_COND_LIMIT) -> np.ndarray:
    """Solve M x = rhs, refusing numerically singular systems.

    Raises :class:`NumericalError` carrying the 2-norm condition estimate when
    it exceeds ``cond_limit``.
    """
    a = as_matrix(m, square=True)
    cond = float(np.linalg.cond(a))
    if not np.isfinite(cond) or cond > cond_limit:
        raise NumericalError(
            f"matrix numerically singular (cond={cond:.3e} > {cond_limit:.3e})",
            condition=cond,
        )
    b = np.asarray(rhs, dtype=complex)
    return np.linalg.solve(a, b)


def expm(m) -> np.ndarray:
    """Matrix exponential e^M (scaling-and-squaring with Pade approximants)."""
    return scipy.linalg.expm(as_matrix(m, square=True))


def eig_general(m) -> np.ndarray:
    """All eigenvalues (with multiplicity) of a general complex matrix, unordered."""
    a = as_matrix(m, square=True)
    try:
        return np.linalg.eigvals(a)
    except np.linalg.LinAlgError as exc:  # QR iteration did not converge
        raise NumericalError(f"eigenvalue iteration failed: {exc}") from exc


def eig_symmetric(
    s, sym_tol: float = DEFAULT_SYMMETRY_TOL
) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a real symmetric matrix.

    Returns ``(w, q)`` with eigenvalues ``w`` ascending and ``q`` orthonormal,
    so that ``q.T @ s @ q = diag(w)``.  Rejects inputs that are not real and
    symmetric within ``sym_tol`` (relative to the matrix norm).
    """
    a = as_matrix(s, square=True)
    scale = max(frobenius(a), 1.0)
    if np.max(np.abs(a.imag)) > sym_tol * scale:
        raise DimensionError("matrix has a non-real part beyond tolerance")
    ar = a.real
    if np.max(np.abs(ar - ar.T)) > sym_tol * scale:
        raise DimensionError("matrix is asymmetric beyond tolerance")
    w, q = np.linalg.eigh(ar)
    return w, q
