"""
From laboratory numbers to reduced units
========================================

Fluorine in a 3 G field. The dipolar coupling has to be supplied, either
directly in kHz or from the internuclear distance.
"""

import numpy as np

from dipolar_entanglement.cli import critical_temperature_uk, dipolar_frequency_khz, reduced_from_frequencies

gamma = 4.0025  # kHz/G
f0 = gamma * 3.0
print(f"Zeeman frequency: {f0:.4f} kHz")

for r_nm in (0.25, 0.3, 0.4):
    print(f"r = {r_nm} nm -> f_dd = {dipolar_frequency_khz(gamma, r_nm):.3f} kHz")

for f_dd in np.linspace(2, 6, 5):
    beta, d = reduced_from_frequencies(f0, f_dd, 0.33)
    print(f"f_dd = {f_dd:.1f} kHz: at 0.33 uK beta = {beta:.3f}, d = {d:.3f}; "
          f"T_c = {critical_temperature_uk(f0, f_dd):.3f} uK")
