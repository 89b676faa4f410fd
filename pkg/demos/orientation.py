"""
Dependence on the pair orientation
==================================

The angle theta between the internuclear vector and the field changes the
coupling; phi only rotates the pair about the field and leaves the
concurrence alone.
"""

import math

import numpy as np

from dipolar_entanglement import concurrence, gibbs, pair_hamiltonian

beta, d = 5.0, 3.0
thetas = np.linspace(0, math.pi, 9)
for t in thetas:
    c = concurrence(gibbs(pair_hamiltonian(beta, d, t)).rho).concurrence
    print(f"theta = {t / math.pi:5.3f} pi   C = {c:.6f}  " + "#" * int(60 * c))

# magic angle: the secular part vanishes but the other terms do not
magic = math.acos(1 / math.sqrt(3))
print("magic angle:", concurrence(gibbs(pair_hamiltonian(beta, d, magic)).rho).concurrence)

vals = [concurrence(gibbs(pair_hamiltonian(beta, d, math.pi / 3, p)).rho).concurrence
        for p in np.linspace(0, 2 * math.pi, 8, endpoint=False)]
print("spread over phi:", max(vals) - min(vals))
