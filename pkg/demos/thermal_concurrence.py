"""
Thermal concurrence of a dipolar pair
=====================================

Build the two-spin Hamiltonian in reduced units, form the Gibbs state and
read off the concurrence, then compare with the closed form.
"""

import numpy as np

from dipolar_entanglement import concurrence, concurrence_closed, gibbs, magnetization, pair_hamiltonian

# beta = Zeeman energy / kT, d = dipolar energy / kT; the pair sits at a
# right angle to the field
h = pair_hamiltonian(beta=5.0, d=3.0)
print(np.round(h.real, 3))

state = gibbs(h)
print("trace:", np.trace(state.rho).real)
print("log Z:", state.log_z)

res = concurrence(state.rho)
print("concurrence (numeric):", res.concurrence)
print("concurrence (closed) :", concurrence_closed(5.0, 3.0))
print("magnetization        :", magnetization(state.rho, 2))

# cooling at fixed field and coupling moves (beta, d) along a ray
for scale in (0.2, 0.5, 1.0, 2.0):
    b, d = 5.0 * scale, 3.0 * scale
    print(f"beta={b:5.2f} d={d:5.2f}  C={concurrence(gibbs(pair_hamiltonian(b, d)).rho).concurrence:.6f}")
