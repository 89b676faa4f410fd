"""
A pair inside a larger cluster
==============================

Three spins on an equilateral triangle perpendicular to the field. Each
pair sees the third spin as part of its environment; the reduced pair
state is obtained by a partial trace.
"""

import math

import numpy as np

from dipolar_entanglement import (
    ReducedParams, SpinGeometry, concurrence, gibbs, magnetization, partial_trace_pair, pair_hamiltonian,
    total_hamiltonian,
)

sites = [[1, 0, 0], [-0.5, math.sqrt(3) / 2, 0], [-0.5, -math.sqrt(3) / 2, 0]]
geom = SpinGeometry.from_positions(sites)
for p in geom.pairs:
    print(p)

# site separation is sqrt(3), so the nearest-neighbour coupling is d_ref / 3^(3/2)
params = ReducedParams(beta=5.0, d_ref=3.0 * 3 ** 1.5)
rho = gibbs(total_hamiltonian(geom, params)).rho
for j, k in [(1, 2), (1, 3), (2, 3)]:
    print((j, k), concurrence(partial_trace_pair(rho, 3, j, k)).concurrence)
print("total magnetization:", magnetization(rho, 3))

# an isolated pair with the same coupling, for comparison
print("isolated pair:", concurrence(gibbs(pair_hamiltonian(5.0, 3.0)).rho).concurrence)
