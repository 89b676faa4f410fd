"""
Spin-1/2 operators and reduced Hamiltonians for dipolar-coupled spins.

Everything here works in reduced units: energies are divided by k_B T and
hbar = 1, so a parameter point is fully described by ``beta`` (Zeeman
splitting / k_B T) and ``d_ref`` (dipolar constant gamma^2 / r_ref^3 / k_B T).

Basis convention: single-spin basis (up, down), site 1 is the leftmost
Kronecker factor, so for two spins the order is (uu, ud, du, dd).
"""

from dataclasses import dataclass
from functools import lru_cache
import math

import numpy as np

from .errors import DomainError, GeometryMismatch, SiteOutOfRange

MAX_SPINS = 14

_SINGLE = {
    "z": np.array([[0.5, 0.0], [0.0, -0.5]], dtype=np.complex128),
    "plus": np.array([[0.0, 1.0], [0.0, 0.0]], dtype=np.complex128),
    "minus": np.array([[0.0, 0.0], [1.0, 0.0]], dtype=np.complex128),
}


@dataclass(frozen=True)
class PairCoord:
    """Spherical coordinates of the vector joining sites ``j < k`` (1-based)."""

    j: int
    k: int
    r: float
    theta: float
    phi: float


@dataclass(frozen=True)
class SpinGeometry:
    """
    Pairwise geometry of ``n_spins`` sites.

    Distances are in units of the reference length used to define ``d_ref``;
    angles are measured from the field axis z.
    """

    n_spins: int
    pairs: tuple

    def __post_init__(self):
        if self.n_spins < 1:
            raise GeometryMismatch("n_spins must be >= 1")
        expected = self.n_spins * (self.n_spins - 1) // 2
        if len(self.pairs) != expected:
            raise GeometryMismatch(
                f"{self.n_spins} spins need {expected} pair entries, got {len(self.pairs)}"
            )
        seen = set()
        for p in self.pairs:
            if not (1 <= p.j < p.k <= self.n_spins):
                raise GeometryMismatch(f"bad pair indices ({p.j}, {p.k})")
            if (p.j, p.k) in seen:
                raise GeometryMismatch(f"duplicate pair ({p.j}, {p.k})")
            seen.add((p.j, p.k))
            if not p.r > 0:
                raise GeometryMismatch(f"pair ({p.j}, {p.k}) has non-positive distance")
            if not 0.0 <= p.theta <= math.pi:
                raise GeometryMismatch(f"pair ({p.j}, {p.k}) has theta outside [0, pi]")
            if not 0.0 <= p.phi < 2 * math.pi:
                raise GeometryMismatch(f"pair ({p.j}, {p.k}) has phi outside [0, 2pi)")

    @classmethod
    def pair(cls, r: float = 1.0, theta: float = math.pi / 2, phi: float = 0.0):
        return cls(2, (PairCoord(1, 2, r, theta, phi),))

    @classmethod
    def from_positions(cls, positions) -> "SpinGeometry":
        """
        Build the geometry from Cartesian site positions (shape ``(N, 3)``).

        Raises ``GeometryMismatch`` if two sites coincide.
        """
        xyz = np.asarray(positions, dtype=np.float64)
        if xyz.ndim != 2 or xyz.shape[1] != 3 or xyz.shape[0] < 1:
            raise GeometryMismatch(f"positions must have shape (N, 3), got {xyz.shape}")
        n = xyz.shape[0]
        pairs = []
        for j in range(n):
            for k in range(j + 1, n):
                x, y, z = xyz[k] - xyz[j]
                r = math.sqrt(x * x + y * y + z * z)
                if r == 0.0:
                    raise GeometryMismatch(f"sites {j + 1} and {k + 1} coincide")
                theta = math.acos(max(-1.0, min(1.0, z / r)))
                phi = math.atan2(y, x) % (2 * math.pi)
                if phi >= 2 * math.pi:
                    phi = 0.0
                pairs.append(PairCoord(j + 1, k + 1, r, theta, phi))
        return cls(n, tuple(pairs))


@dataclass(frozen=True)
class ReducedParams:
    """
    Dimensionless parameter point.

    ``theta`` and ``phi`` give the field direction relative to the pair
    vector and are only used for two-spin systems; larger clusters take their
    angles from the geometry.
    """

    beta: float
    d_ref: float
    theta: float = math.pi / 2
    phi: float = 0.0

    def __post_init__(self):
        for name in ("beta", "d_ref", "theta", "phi"):
            if not math.isfinite(getattr(self, name)):
                raise DomainError(f"{name} must be finite")
        if self.beta < 0:
            raise DomainError("beta must be >= 0 (reversed fields are not supported)")
        if self.d_ref < 0:
            raise DomainError("d_ref must be >= 0")


def _check_n(n_spins: int) -> None:
    if not 1 <= n_spins <= MAX_SPINS:
        raise DomainError(f"n_spins must be in [1, {MAX_SPINS}], got {n_spins}")


@lru_cache(maxsize=256)
def _site_operator(n_spins: int, site: int, which: str) -> np.ndarray:
    left = np.eye(2 ** (site - 1), dtype=np.complex128)
    right = np.eye(2 ** (n_spins - site), dtype=np.complex128)
    op = np.kron(np.kron(left, _SINGLE[which]), right)
    op.setflags(write=False)
    return op


def spin_operator(n_spins: int, site: int, which: str) -> np.ndarray:
    """
    Single-site spin operator embedded in the ``2**n_spins`` space.

    Parameters
    ----------
    n_spins : int
    site : int
        1-based site index.
    which : {"z", "plus", "minus"}

    Returns
    -------
    ndarray
        A fresh writable copy.
    """
    _check_n(n_spins)
    if which not in _SINGLE:
        raise ValueError(f"unknown operator {which!r}; expected z, plus or minus")
    if not 1 <= site <= n_spins:
        raise SiteOutOfRange(f"site {site} outside 1..{n_spins}")
    return _site_operator(n_spins, site, which).copy()


@lru_cache(maxsize=16)
def total_iz(n_spins: int) -> np.ndarray:
    """Read-only total z spin operator sum_k I_k^z."""
    _check_n(n_spins)
    op = sum(_site_operator(n_spins, k, "z") for k in range(1, n_spins + 1))
    op = np.array(op)
    op.setflags(write=False)
    return op


@lru_cache(maxsize=256)
def _pair_terms(n_spins: int, j: int, k: int):
    # angle-independent pieces of the pair interaction, cached read-only
    zj, zk = _site_operator(n_spins, j, "z"), _site_operator(n_spins, k, "z")
    pj, pk = _site_operator(n_spins, j, "plus"), _site_operator(n_spins, k, "plus")
    mj, mk = _site_operator(n_spins, j, "minus"), _site_operator(n_spins, k, "minus")
    secular = zj @ zk - 0.25 * (pj @ mk + mj @ pk)
    single = zj @ pk + pj @ zk
    double = pj @ pk
    for t in (secular, single, double):
        t.setflags(write=False)
    return secular, single, double


def pair_interaction(n_spins: int, j: int, k: int, theta: float, phi: float) -> np.ndarray:
    """Angular part of the full dipolar coupling between sites j and k (unit strength)."""
    secular, single, double = _pair_terms(n_spins, j, k)
    e1 = np.exp(-1j * phi)
    e2 = np.exp(-2j * phi)
    single_term = e1 * single
    double_term = e2 * double
    h = (1.0 - 3.0 * math.cos(theta) ** 2) * secular
    h = h - 0.75 * math.sin(2.0 * theta) * (single_term + single_term.conj().T)
    h = h - 0.75 * math.sin(theta) ** 2 * (double_term + double_term.conj().T)
    return h


def zeeman_hamiltonian(n_spins: int, beta: float) -> np.ndarray:
    """Reduced Zeeman term ``beta * sum_k I_k^z``."""
    if beta < 0:
        raise DomainError("beta must be >= 0")
    return beta * total_iz(n_spins)


def dipolar_hamiltonian(geom: SpinGeometry, params: ReducedParams) -> np.ndarray:
    """
    Full (untruncated) reduced dipolar Hamiltonian.

    Each pair contributes with strength ``d_ref / r_jk**3``. For two spins the
    field direction is taken from ``params.theta`` / ``params.phi`` and only
    the distance is read from the geometry.
    """
    n = geom.n_spins
    _check_n(n)
    if len(geom.pairs) != n * (n - 1) // 2:
        raise GeometryMismatch("pair count does not match n_spins")
    h = np.zeros((2**n, 2**n), dtype=np.complex128)
    if params.d_ref == 0.0:
        return h
    for p in geom.pairs:
        theta, phi = (params.theta, params.phi) if n == 2 else (p.theta, p.phi)
        h += (params.d_ref / p.r**3) * pair_interaction(n, p.j, p.k, theta, phi)
    return h


def total_hamiltonian(geom: SpinGeometry, params: ReducedParams) -> np.ndarray:
    """Zeeman plus dipolar reduced Hamiltonian."""
    return zeeman_hamiltonian(geom.n_spins, params.beta) + dipolar_hamiltonian(geom, params)


def pair_hamiltonian(beta: float, d: float, theta: float = math.pi / 2, phi: float = 0.0) -> np.ndarray:
    """Shortcut for the two-spin reduced Hamiltonian at unit separation."""
    return total_hamiltonian(SpinGeometry.pair(), ReducedParams(beta, d, theta, phi))
