"""Wootters concurrence for two spin-1/2 density matrices."""

from typing import NamedTuple

import numpy as np

from .errors import DimensionMismatch, NotDensityMatrix, NotXState
from .linalg import as_matrix, herm_eig, is_hermitian, psd_sqrt, scale

SIGMA_Y = np.array([[0.0, -1j], [1j, 0.0]], dtype=np.complex128)
YY = np.kron(SIGMA_Y, SIGMA_Y)
YY.setflags(write=False)

TRACE_TOL = 1e-10
PSD_TOL = 1e-8

# positions of the X pattern (diagonal and anti-diagonal) in a 4x4 matrix
_X_MASK = np.eye(4, dtype=bool) | np.fliplr(np.eye(4, dtype=bool))


class ConcurrenceResult(NamedTuple):
    concurrence: float
    lambdas: tuple

    @property
    def margin(self) -> float:
        """Signed ``l1 - l2 - l3 - l4``; positive exactly when entangled."""
        l1, l2, l3, l4 = self.lambdas
        return l1 - l2 - l3 - l4


def _as_two_qubit(rho) -> np.ndarray:
    m = as_matrix(rho)
    if m.shape != (4, 4):
        raise DimensionMismatch(f"expected a 4x4 two-spin matrix, got {m.shape}")
    return m


def spin_flip(rho) -> np.ndarray:
    """Spin-flipped state ``(sy x sy) conj(rho) (sy x sy)``."""
    m = _as_two_qubit(rho)
    return YY @ m.conj() @ YY


def _check_density(m: np.ndarray) -> None:
    if not is_hermitian(m):
        raise NotDensityMatrix("matrix is not Hermitian")
    tr = np.trace(m)
    if abs(tr - 1.0) > TRACE_TOL:
        raise NotDensityMatrix(f"trace is {tr.real:.12g}, expected 1")
    if herm_eig(m).eigenvalues[0] < -PSD_TOL:
        raise NotDensityMatrix("matrix has negative eigenvalues")


def concurrence(rho) -> ConcurrenceResult:
    """
    Concurrence of a two-spin state.

    The lambdas are the singular values of ``sqrt(rho) @ sqrt(spin_flip(rho))``.
    Their squares are the eigenvalues of the Hermitian PSD matrix
    ``sqrt(rho) @ spin_flip(rho) @ sqrt(rho)``, which shares its spectrum with
    ``rho @ spin_flip(rho)``. Taking singular values directly avoids the
    square root of near-zero eigenvalues, which would turn 1e-16 roundoff
    into 1e-8 errors at low temperature.

    Returns
    -------
    ConcurrenceResult
        Concurrence in [0, 1] and the four lambdas in descending order.
    """
    m = _as_two_qubit(rho)
    _check_density(m)
    root = psd_sqrt(m)
    # sqrt commutes with the spin flip, so spin_flip(root) == sqrt(spin_flip(rho))
    lam = np.linalg.svd(root @ spin_flip(root), compute_uv=False)
    lam = tuple(float(x) for x in lam)
    c = lam[0] - lam[1] - lam[2] - lam[3]
    return ConcurrenceResult(min(1.0, max(0.0, c)), lam)


def is_x_state(rho, atol: float = 1e-12) -> bool:
    m = _as_two_qubit(rho)
    return bool(np.all(np.abs(m[~_X_MASK]) <= atol * scale(m)))


def concurrence_x_state(rho) -> float:
    """
    Closed-form concurrence of an X-shaped two-spin state.

    Raises ``NotXState`` if any entry off the diagonal and anti-diagonal
    exceeds 1e-12.
    """
    m = _as_two_qubit(rho)
    if not is_x_state(m):
        raise NotXState("matrix has entries outside the diagonal and anti-diagonal")
    p = m.diagonal().real.clip(0.0, None)
    a = abs(m[0, 3]) - np.sqrt(p[1] * p[2])
    b = abs(m[1, 2]) - np.sqrt(p[0] * p[3])
    return float(2.0 * max(0.0, a, b))
