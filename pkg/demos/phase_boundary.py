"""
Where entanglement switches on
==============================

For each d there is a critical beta above which the pair is entangled.
Two solvers: bisection on the closed-form margin and bisection on the
numerical one.
"""

import numpy as np

from dipolar_entanglement import boundary_beta_analytic, boundary_beta_numeric
from dipolar_entanglement.sweep import trace_boundary

p = boundary_beta_analytic(1.0)
print(f"d = 1: beta_c = {p.beta_c:.6f}, residual {p.residual:.1e}")
print(f"numeric solver: {boundary_beta_numeric(1.0).beta_c:.6f}")

# the critical beta grows without bound as the coupling goes away
for pt in trace_boundary(np.geomspace(0.01, 10, 7)):
    print(f"d = {pt.d:8.4f}   beta_c = {pt.beta_c:8.4f}")
