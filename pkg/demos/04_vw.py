"""
Weighted (V, W) models
======================

Weights V, W with W_i = 1/V_i keep every relation intact; the Master basis
becomes (Omega_V)^t.
"""
import numpy as np

from tlrefl import build_tl_data, fourier_model, tl_check
from tlrefl.kfactory import DClass, KBlockPlan, TwoEigen, assemble_K
from tlrefl.reflection import build_braid_R, build_mu, master_projector_defect, reflection_residual

rng = np.random.default_rng(4)
v = rng.standard_normal(3) + 1j * rng.standard_normal(3)
data = build_tl_data(fourier_model(3, vw=(v, 1 / v)))

print("tr(WV) =", data.vw_trace)
print("TL check:", tl_check(data)["passes"])
for r in range(3):
    mu = build_mu(data, r).matrix
    print(f"mu_{r}: trace {np.trace(mu):.6f}, Master-basis defect {master_projector_defect(data, r):.2e}")

_, k = assemble_K(KBlockPlan([DClass(None, [TwoEigen(3, 1)])]), data, seed=9)
print("reflection residual:", reflection_residual(build_braid_R(data), k))

# W = 2.5 / V rescales the trace; the relations survive after normalizing by tr(WV)/n
scaled = build_tl_data(fourier_model(3, vw=(v, 2.5 / v)))
print("tr(WV) =", scaled.vw_trace, " TL check:", tl_check(scaled)["passes"])
