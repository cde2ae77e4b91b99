"""
Equilibria and their stability
===============================

Where the four equilibria sit for the table parameters, and how the sign
of the Routh-Hurwitz quantity Δ splits the (k1, k2) plane.
"""

# %%
import numpy as np

from biocontrol_hopf import (classify_all, delta_at_A4, equilibria, k1_max, reproduction_numbers,
                             table_params)

p = table_params(0.002, 0.0007)
R1, R2 = reproduction_numbers(p)
print(f"R1 = {R1:.6f}, R2 = {R2:.6f}, k1_max = {k1_max(p):.7f}")

# %%
# A1 is the origin, A2 and A3 carry one species each, A4 both.
for name, x in equilibria(p).items():
    print(name, np.round(x, 4))

# %%
for c in classify_all(p):
    print(f"{c.which}: {c.label}")

# %%
# Δ > 0 means A4 is stable. A coarse map of its sign over admissible points,
# for k1 up to 0.0045 and k2 <= k1 on a log grid ('+' stable, '-' unstable, ' ' outside).
k1s = np.linspace(1e-4, 0.0045, 45)
for k2 in np.geomspace(3e-3, 1e-5, 16):
    row = ""
    for k1 in k1s:
        row += " " if k2 > k1 else ("+" if delta_at_A4(table_params(k1, k2)) > 0 else "-")
    print(f"k2 = {k2:8.2e} |{row}|")
