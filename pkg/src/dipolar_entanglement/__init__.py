"""
Thermal entanglement of spin-1/2 pairs coupled by the full dipole-dipole
interaction in a low external field.

The numerical pipeline is

    spin_model.total_hamiltonian -> thermal.gibbs -> entanglement.concurrence

and :mod:`analytic` holds the closed forms validated against it.
"""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    DipolarError,
    DimensionMismatch,
    DomainError,
    GeometryMismatch,
    InsufficientEntangledPoints,
    NoRootInBracket,
    NotDensityMatrix,
    NotHermitian,
    NotPSD,
    NotXState,
    SiteOutOfRange,
    UnknownFigure,
)
from .spin_model import ReducedParams, SpinGeometry, pair_hamiltonian, total_hamiltonian  # noqa: E402
from .thermal import ThermalState, gibbs, magnetization, partial_trace_pair  # noqa: E402
from .entanglement import concurrence, concurrence_x_state  # noqa: E402
from .analytic import (  # noqa: E402
    boundary_beta_analytic,
    boundary_beta_numeric,
    concurrence_closed,
    magnetization_closed,
)
