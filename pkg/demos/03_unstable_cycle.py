"""
The unstable cycle near the Hopf point
======================================

Just inside the stable region the equilibrium is surrounded by a small
unstable periodic orbit. Find it by shooting, read off its Floquet
multipliers and watch its size grow like the square root of the distance
to the Hopf curve.
"""

# %%
import numpy as np

from biocontrol_hopf import find_periodic_orbit, gradient_delta, hopf_point_q, table_params

k1q, k2q = hopf_point_q()
g = gradient_delta(k1q, k2q)
normal = g / np.linalg.norm(g)


def params_at(eps):
    return table_params(k1q + eps * normal[0], k2q + eps * normal[1])


# %%
orbit = find_periodic_orbit(params_at(1.9e-5))
lam = orbit.diagnostics["eigenvalue"]
print(f"Re lambda = {lam.real:.3g}, period = {orbit.period:.6f} (2 pi/omega = {2 * np.pi / lam.imag:.6f})")
print("|multipliers| =", np.round(np.abs(orbit.multipliers), 6))
print("verdict:", orbit.verdict)

# %%
eps = np.geomspace(1.9e-7, 1.9e-5, 5)
amps = np.array([find_periodic_orbit(params_at(e)).amplitude for e in eps])
for e, a in zip(eps, amps):
    print(f"eps = {e:.2e}  amplitude = {a:.4f}")
print("log-log slope:", np.polyfit(np.log(eps), np.log(amps), 1)[0])
