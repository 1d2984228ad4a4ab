"""Temperley-Lieb R-matrices from Hadamard Master data and their constant K-matrices."""

__version__ = "0.1.0"

from .errors import TLReflError
from .numerics import Tolerance
from .hadamard import fourier_matrix, hadamard_inverse, is_generalized_hadamard, is_vw_hadamard
from .model import ModelSpec, TLData, build_tl_data, fourier_model, tl_check, validate_model
from .reflection import (algebraic_residual, build_braid_R, build_mu, build_R, component_residuals,
                         from_master, reflection_residual, to_master, ybe_residual)
from .kfactory import (DClass, Involution, KBlockPlan, Nilpotent, TwoEigen, Zero, assemble_K,
                       moduli_dim, numeric_moduli_check)

__all__ = [
    "TLReflError", "Tolerance",
    "fourier_matrix", "hadamard_inverse", "is_generalized_hadamard", "is_vw_hadamard",
    "ModelSpec", "TLData", "build_tl_data", "fourier_model", "tl_check", "validate_model",
    "algebraic_residual", "build_braid_R", "build_mu", "build_R", "component_residuals",
    "from_master", "reflection_residual", "to_master", "ybe_residual",
    "DClass", "Involution", "KBlockPlan", "Nilpotent", "TwoEigen", "Zero", "assemble_K",
    "moduli_dim", "numeric_moduli_check",
]
