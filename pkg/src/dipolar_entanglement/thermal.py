"""Thermal equilibrium states, pair reductions and expectation values."""

from dataclasses import dataclass
import math

import numpy as np

from .errors import DimensionMismatch, NotHermitian, SiteOutOfRange
from .linalg import as_matrix, from_eig, herm_eig, is_hermitian
from .spin_model import total_iz


@dataclass(frozen=True)
class ThermalState:
    """Density matrix ``exp(-h) / Z`` together with ``log Z``."""

    rho: np.ndarray
    log_z: float

    @property
    def dim(self) -> int:
        return self.rho.shape[0]


def gibbs(h) -> ThermalState:
    """
    Gibbs state of a reduced (already divided by k_B T) Hamiltonian.

    The spectrum is shifted by its minimum before exponentiation, so
    arbitrarily large reduced energies do not overflow.

    Examples
    --------
    >>> st = gibbs(np.zeros((4, 4)))
    >>> np.allclose(st.rho, np.eye(4) / 4), round(st.log_z, 12) == round(math.log(4), 12)
    (True, True)
    """
    w, v = herm_eig(h)
    shifted = np.exp(-(w - w[0]))
    total = shifted.sum()
    rho = from_eig(shifted / total, v)
    # exact Hermitian symmetrization; removes O(eps) skew from the product
    rho = 0.5 * (rho + rho.conj().T)
    rho.setflags(write=False)
    return ThermalState(rho=rho, log_z=float(-w[0] + math.log(total)))


def partial_trace_pair(rho, n_spins: int, site_a: int, site_b: int) -> np.ndarray:
    """
    Reduce an ``n_spins`` density matrix to the 4x4 state of sites a < b.

    The result is ordered with ``site_a`` as the left factor, matching the
    basis convention of :mod:`spin_model`.
    """
    m = as_matrix(rho)
    if m.shape[0] != 2**n_spins:
        raise DimensionMismatch(f"rho has dimension {m.shape[0]}, expected {2**n_spins}")
    if not 1 <= site_a < site_b <= n_spins:
        raise SiteOutOfRange(f"need 1 <= a < b <= {n_spins}, got ({site_a}, {site_b})")
    if n_spins == 2:
        return m.copy()
    t = m.reshape((2,) * (2 * n_spins))
    a, b = site_a - 1, site_b - 1
    others = [s for s in range(n_spins) if s not in (a, b)]
    # row indices and column indices share labels on traced sites
    row = list(range(n_spins))
    col = [n_spins + s for s in range(n_spins)]
    for s in others:
        col[s] = row[s]
    out = np.einsum(t, row + col, [a, b, n_spins + a, n_spins + b])
    return out.reshape(4, 4)


def expectation(rho, obs) -> float:
    """
    ``Tr(rho @ obs)`` for a Hermitian observable.

    Raises
    ------
    DimensionMismatch, NotHermitian
    """
    r, o = as_matrix(rho), as_matrix(obs)
    if r.shape != o.shape:
        raise DimensionMismatch(f"rho {r.shape} and observable {o.shape} differ")
    if not is_hermitian(o):
        raise NotHermitian("observable is not Hermitian")
    val = np.einsum("ij,ji->", r, o)
    if abs(val.imag) > 1e-10 * max(1.0, abs(val.real)):
        raise NotHermitian(f"expectation has imaginary part {val.imag:.3e}")
    return float(val.real)


def magnetization(rho, n_spins: int) -> float:
    """Total magnetization ``Tr(rho sum_k I_k^z)``; saturates at -n/2."""
    r = as_matrix(rho)
    if r.shape[0] != 2**n_spins:
        raise DimensionMismatch(f"rho has dimension {r.shape[0]}, expected {2**n_spins}")
    return expectation(r, total_iz(n_spins))

