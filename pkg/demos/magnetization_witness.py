"""
Magnetization as an entanglement indicator
==========================================

Below the Curie-law regime concurrence is close to linear in the
magnetization, so a fit C = a (M + b) lets a measured M stand in for C.
"""

import numpy as np

from dipolar_entanglement import concurrence, gibbs, magnetization, magnetization_closed, pair_hamiltonian
from dipolar_entanglement.sweep import fit_concurrence_vs_magnetization

d = 3.0
for beta in np.linspace(0, 6, 13):
    st = gibbs(pair_hamiltonian(beta, d))
    print(f"beta={beta:4.1f}  M={magnetization(st.rho, 2):+.5f}  C={concurrence(st.rho).concurrence:.5f}")

fit = fit_concurrence_vs_magnetization(d, beta_max=3.32)
print(f"\nC = {fit.a:.3f} (M + {fit.b:.3f}), rms {fit.residual_rms:.1e} over {fit.n_points} points")

# saturation is slow: the d-dependent correction dies off like 1/beta^2
for beta in (10, 50, 1e3, 1e4):
    print(f"M({beta:g}, 3) = {magnetization_closed(beta, d):.9f}")
