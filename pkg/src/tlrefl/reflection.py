"""R-matrix, braid and reflection-equation residuals, Master-basis projectors.

Two forms of the constant R-matrix appear here.  ``build_R`` returns
``R = P (q I + T)`` with ``P`` the swap operator, which solves the
Yang-Baxter equation ``R12 R13 R23 = R23 R13 R12``.  The braid form
``Rb = P R = q I + T`` satisfies ``Rb1 Rb2 Rb1 = Rb2 Rb1 Rb2`` and is the
operator for which ``Rb K1 Rb K1 = K1 Rb K1 Rb`` decouples into the
one-space equations handled below.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ShapeMismatchError
from .model import TLData
from .numerics import (DEFAULT_TOL, Tolerance, cmatrix, fro, identity, int_power, kron,
                       numeric_rank, permutation_op, rel_residual, unit_matrix)


def build_R(data: TLData) -> np.ndarray:
    n = data.n
    return permutation_op(n) @ build_braid_R(data)


def build_braid_R(data: TLData) -> np.ndarray:
    """``q c I + T`` where ``c = tr(WV)/n`` (``c = 1`` without V, W)."""
    n = data.n
    return data.q * data.vw_scale * identity(n * n) + data.t_gen


def ybe_residual(data: TLData, tol: Tolerance = DEFAULT_TOL) -> float:
    """Braid relation for the braid-form R on three sites."""
    rb = build_braid_R(data)
    one = identity(data.n)
    r1 = kron(rb, one)
    r2 = kron(one, rb)
    return rel_residual(r1 @ r2 @ r1, r2 @ r1 @ r2)


def yang_baxter_residual(data: TLData) -> float:
    """``R12 R13 R23 = R23 R13 R12`` for ``R = build_R(data)``."""
    n = data.n
    r = build_R(data)
    one = identity(n)
    swap23 = kron(one, permutation_op(n))
    r12 = kron(r, one)
    r23 = kron(one, r)
    r13 = swap23 @ r12 @ swap23
    return rel_residual(r12 @ r13 @ r23, r23 @ r13 @ r12)


def reflection_residual(r_mat, k) -> float:
    """``R K1 R K1`` against ``K1 R K1 R`` with ``K1 = K (x) I``.

    ``r_mat`` should be the braid-form matrix from :func:`build_braid_R`.
    """
    r_mat = cmatrix(r_mat)
    k = cmatrix(k)
    n = k.shape[0]
    if k.shape != (n, n) or r_mat.shape != (n * n, n * n):
        raise ShapeMismatchError(f"R {r_mat.shape} and K {k.shape} are incompatible")
    k1 = kron(k, identity(n))
    return rel_residual(r_mat @ k1 @ r_mat @ k1, k1 @ r_mat @ k1 @ r_mat)


@dataclass(frozen=True, eq=False)
class MuProjector:
    r: int
    matrix: np.ndarray


def build_mu(data: TLData, r: int, tol: Tolerance = DEFAULT_TOL, check: bool = True) -> MuProjector:
    """Rank-one projector ``mu_(r)`` for eigenvalue index ``r`` (0-based).

    Entry ``(k, i)`` is ``V_k W_i lambda_r ** (n_k - n_i)``; without V, W the
    weights are 1.  ``mu^2 = tr(WV) mu`` and ``tr mu = tr(WV)``.
    """
    spec = data.spec
    n = spec.n
    if not 0 <= r < n:
        raise IndexError(f"eigenvalue index {r} out of range for n={n}")
    lam = spec.lambdas[r]
    mu = np.empty((n, n), dtype=np.complex128)
    for k in range(n):
        for i in range(n):
            mu[k, i] = int_power(lam, spec.exponents[k] - spec.exponents[i])
    mu *= spec.weights
    if check:
        c = spec.vw_trace
        if numeric_rank(mu, tol) != 1:
            raise ArithmeticError(f"mu_({r}) is not rank one")
        if rel_residual(mu @ mu, c * mu) > tol.eps_rel:
            raise ArithmeticError(f"mu_({r})^2 != tr(WV) mu_({r})")
    return MuProjector(r, mu)


def to_master(data: TLData, k) -> np.ndarray:
    return data.s_inv @ cmatrix(k) @ data.s_basis


def from_master(data: TLData, k) -> np.ndarray:
    return data.s_basis @ cmatrix(k) @ data.s_inv


def master_projector_defect(data: TLData, r: int) -> float:
    """``||S^{-1} mu_(r) S - tr(WV) e_rr||_F``."""
    mu = build_mu(data, r, check=False).matrix
    return fro(to_master(data, mu) - data.vw_trace * unit_matrix(data.n, r, r))


def algebraic_residual(data: TLData, k, r: int) -> float:
    """One-space equation ``(Tr mu K)(mu K - K mu) = q c (K^2 mu - mu K^2)``.

    ``k`` is given in the original basis.
    """
    k = cmatrix(k)
    mu = build_mu(data, r, check=False).matrix
    k2 = k @ k
    lhs = np.trace(mu @ k) * (mu @ k - k @ mu)
    rhs = data.q * data.vw_scale * (k2 @ mu - mu @ k2)
    return rel_residual(lhs, rhs)


def algebraic_residuals(data: TLData, k) -> list[float]:
    return [algebraic_residual(data, k, r) for r in range(data.n)]


def component_residuals(data: TLData, k_master) -> list[float]:
    """``|K_rr K_rj + (q/n)(K^2)_rj|`` and its ``jr`` mirror for every ``r != j``.

    Each value is normalised by ``1 + ||K||_F^2``.  Ordering: for each
    ordered pair ``(r, j)``, first the ``rj`` then the ``jr`` entry.
    """
    k = cmatrix(k_master)
    n = data.n
    k2 = k @ k
    coeff = data.q / n
    scale = 1.0 + fro(k) ** 2
    out = []
    for r in range(n):
        for j in range(n):
            if r == j:
                continue
            out.append(abs(k[r, r] * k[r, j] + coeff * k2[r, j]) / scale)
            out.append(abs(k[r, r] * k[j, r] + coeff * k2[j, r]) / scale)
    return out
