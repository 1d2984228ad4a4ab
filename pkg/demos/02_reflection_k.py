"""
Constant K-matrices
===================

Assemble K from a block plan, look at it in both bases and confirm the
reflection equation.
"""
import numpy as np

from tlrefl import build_tl_data, fourier_model
from tlrefl.kfactory import DClass, KBlockPlan, Nilpotent, TwoEigen, Zero, assemble_K
from tlrefl.reflection import (algebraic_residuals, build_braid_R, component_residuals, from_master,
                               reflection_residual, to_master)

np.set_printoptions(precision=3, suppress=True, linewidth=120)

data = build_tl_data(fourier_model(3))
r_b = build_braid_R(data)

# One class with d = 1 holding a 3x3 two-eigenvalue block
k_master, k = assemble_K(KBlockPlan([DClass(1.0, [TwoEigen(3, 1)])]), data, seed=0)
print("Master basis:\n", k_master)
print("original basis:\n", k)
print("reflection residual:", reflection_residual(r_b, k))
print("per-projector residuals:", algebraic_residuals(data, k))
print("worst component residual:", max(component_residuals(data, k_master)))

# A nilpotent block in the d = 0 class gives a non-invertible K
plan = KBlockPlan([DClass(0, [Nilpotent(2, 1)]), DClass(1.0, [Zero(1)])])
_, k0 = assemble_K(plan, data, seed=1)
print("det K =", np.linalg.det(k0), " residual:", reflection_residual(r_b, k0))

# Coupling two classes is not allowed: a small cross-class entry breaks it
km = to_master(data, k0)
km[0, 2] += 1e-3
print("perturbed residual:", reflection_residual(r_b, from_master(data, km)))
