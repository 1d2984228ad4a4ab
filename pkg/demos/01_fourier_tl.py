"""
Temperley-Lieb generators from a Fourier matrix
===============================================

Build the two-site generator for the n=3 Fourier model and check the
algebra relations numerically.
"""
import numpy as np

from tlrefl import build_tl_data, fourier_model, tl_check, validate_model
from tlrefl.hadamard import fourier_matrix, is_generalized_hadamard

# The Master matrix of the Fourier model is the Fourier matrix itself
spec = fourier_model(3)
print(np.round(fourier_matrix(3), 3))
print("generalized Hadamard:", is_generalized_hadamard(fourier_matrix(3)))
print("model verdict:", validate_model(spec))

data = build_tl_data(spec)
print("q' =", np.round(data.qprime, 6), " q =", np.round(data.q, 6))

# X^2 = sqrt(n) X and the braid-like relations, also on four sites
for name, value in tl_check(data, four_sites=True).items():
    print(f"{name:>12}: {value}")

# A matrix with the wrong eigenvalues breaks everything
broken = build_tl_data(type(spec)(2, [1, 2], (0, 1)))
print("lambda = (1, 2):", tl_check(broken))
