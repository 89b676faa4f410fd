"""
Dense complex matrix primitives.

All matrices are plain ``numpy.ndarray`` objects of dtype ``complex128``.
Tolerances are relative to ``max(1, max|A|)`` because Gibbs-state entries
span many orders of magnitude.
"""

from typing import Callable, NamedTuple

import numpy as np

from .errors import NotHermitian, NotPSD

HERMITIAN_RTOL = 1e-12
PSD_FAIL = 1e-8


class HermitianEigSystem(NamedTuple):
    """Ascending real eigenvalues and the unitary matrix of eigenvectors (columns)."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def as_matrix(a) -> np.ndarray:
    m = np.asarray(a, dtype=np.complex128)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    return m


def scale(a: np.ndarray) -> float:
    return max(1.0, float(np.max(np.abs(a)))) if a.size else 1.0


def hermiticity_error(a: np.ndarray) -> float:
    return float(np.max(np.abs(a - a.conj().T))) if a.size else 0.0


def is_hermitian(a, rtol: float = HERMITIAN_RTOL) -> bool:
    m = as_matrix(a)
    return hermiticity_error(m) <= rtol * scale(m)


def kron(a, b) -> np.ndarray:
    """Kronecker product; entry (i*db + k, j*db + l) equals a[i, j] * b[k, l]."""
    return np.kron(as_matrix(a), as_matrix(b))


def herm_eig(a) -> HermitianEigSystem:
    """
    Eigendecomposition of a Hermitian matrix.

    Raises
    ------
    NotHermitian
        If ``max|A - A^H|`` exceeds ``1e-12 * max(1, max|A|)``.
    """
    m = as_matrix(a)
    if not is_hermitian(m):
        raise NotHermitian(
            f"matrix is not Hermitian (max|A - A^H| = {hermiticity_error(m):.3e})"
        )
    w, v = np.linalg.eigh(m)
    # eigh already sorts, but the order is part of the contract
    order = np.argsort(w, kind="stable")
    return HermitianEigSystem(w[order], v[:, order])


def from_eig(values: np.ndarray, vectors: np.ndarray) -> np.ndarray:
    """Assemble ``V diag(values) V^H``."""
    return (vectors * values) @ vectors.conj().T


def spectral_fn(a, f: Callable[[np.ndarray], np.ndarray]) -> np.ndarray:
    """
    Apply a real scalar function to a Hermitian matrix through its spectrum.

    ``f`` receives the whole eigenvalue vector and must act elementwise.
    """
    w, v = herm_eig(a)
    return from_eig(np.asarray(f(w), dtype=np.float64), v)


def psd_sqrt(a) -> np.ndarray:
    """
    Hermitian positive semidefinite square root.

    Eigenvalues in ``[-1e-8, 0)`` are treated as roundoff and clamped to zero;
    anything more negative raises ``NotPSD``.
    """
    w, v = herm_eig(a)
    tol = PSD_FAIL * scale(as_matrix(a))
    if w[0] < -tol:
        raise NotPSD(f"matrix has negative eigenvalue {w[0]:.3e}")
    return from_eig(np.sqrt(np.clip(w, 0.0, None)), v)
