"""
The Hopf curve and its first Lyapunov coefficient
=================================================

Trace the curve Δ = 0, look at the Hopf point near (0.00331, 0.001) in
detail, and find the value of c2 beyond which the curve leaves the
admissible region.
"""

# %%
from biocontrol_hopf import find_tangency, hopf_point_q, lyapunov_l1, table_params, trace_sigma

points = trace_sigma(100.0, n_points=12)
print("      k1          k2      omega0  sign(l1)")
for pt in points:
    print(f"{pt.k1:.7f}  {pt.k2:.7f}  {pt.omega0:.5f}    {pt.l1_sign}")

# %%
# The rounded point (0.00331, 0.001) is slightly off the curve; move k1 onto it.
k1, k2 = hopf_point_q()
report = lyapunov_l1(table_params(k1, k2))
print(f"k1 = {k1:.10f}, omega0 = {report.omega0:.6f}")
print(f"G21 = {report.G21:.6g}, l1 = {report.l1:.4g} ({report.criticality})")
print(f"d Re(lambda)/ds along grad Δ = {report.transversality:.4f}")

# %%
# l1 scales with |q|^2, its sign does not.
for scale in (1.0, 10.0, 1000.0):
    print(scale, lyapunov_l1(table_params(k1, k2), q_override=scale * report.q,
                             with_transversality=False).l1)

# %%
t = find_tangency()
print(f"c2* = {t.c2_star:.5f}, tangent at k1 = k2 = {t.T[0]:.6f}")
print("points at c2 = 700:", len(trace_sigma(700.0, 20)))
