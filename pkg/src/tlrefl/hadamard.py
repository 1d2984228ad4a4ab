"""Generalized and V-W Hadamard properties."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

import numpy as np

from .errors import DegenerateTraceError, NotHadamardError, ShapeMismatchError, ZeroEntryError
from .numerics import DEFAULT_TOL, Tolerance, cmatrix, identity, inverse, rel_residual


@dataclass(frozen=True)
class HadamardVerdict:
    passes: bool
    residual: float
    property: Literal["Plain", "VW"]

    def __bool__(self) -> bool:
        return self.passes


def hadamard_inverse(u, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """Entrywise reciprocal ``(U^{-H})_ij = 1 / U_ij``."""
    u = cmatrix(u)
    if np.any(np.abs(u) <= tol.eps_rank):
        raise ZeroEntryError("matrix has a (numerically) zero entry")
    return 1.0 / u


def _square(u) -> np.ndarray:
    u = cmatrix(u)
    if u.shape[0] != u.shape[1]:
        raise ShapeMismatchError(f"expected a square matrix, got {u.shape}")
    return u


def is_generalized_hadamard(u, tol: Tolerance = DEFAULT_TOL) -> HadamardVerdict:
    """Check ``U^{-H} = n (U^{-1})^t``."""
    u = _square(u)
    n = u.shape[0]
    residual = rel_residual(hadamard_inverse(u, tol), n * inverse(u, tol).T)
    return HadamardVerdict(bool(residual <= tol.eps_rel), residual, "Plain")


def is_vw_hadamard(u, v, w, tol: Tolerance = DEFAULT_TOL) -> HadamardVerdict:
    """Check ``U^{-H} diag(v) diag(w) U^t = tr(WV) I``."""
    u = _square(u)
    n = u.shape[0]
    v = np.asarray(v, dtype=np.complex128).ravel()
    w = np.asarray(w, dtype=np.complex128).ravel()
    if v.size != n or w.size != n:
        raise ShapeMismatchError("v and w must have length n")
    trace = complex(np.sum(v * w))
    if abs(trace) <= tol.eps_rank * max(1.0, float(np.max(np.abs(v * w)))):
        raise DegenerateTraceError("sum_i v_i w_i vanishes")
    lhs = hadamard_inverse(u, tol) @ np.diag(v * w) @ u.T
    residual = rel_residual(lhs, trace * identity(n))
    return HadamardVerdict(bool(residual <= tol.eps_rel), residual, "VW")


def fourier_matrix(n: int) -> np.ndarray:
    if n < 1:
        raise ValueError("n must be >= 1")
    k = np.arange(n)
    return np.exp(2j * np.pi * np.outer(k, k) / n)


def build_P(omega, h, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """Eigenvector matrix ``P = Omega^{-1} H`` for a generalized Hadamard ``H``."""
    verdict = is_generalized_hadamard(h, tol)
    if not verdict.passes:
        raise NotHadamardError(f"H fails the generalized Hadamard property (residual {verdict.residual:.3e})")
    return inverse(omega, tol) @ cmatrix(h)
