"""Model data: Master matrix, TL parameter and the Temperley-Lieb generator.

A model is fixed by ``n`` distinct nonzero eigenvalues ``lambda_a`` of the
auxiliary matrix ``M`` and integer exponents ``n_a``.  The generator on two
adjacent sites is

    T = sum_{a,b} c_ab e_ab (x) M^(n_a - n_b),     X = T / sqrt(n),

with ``c_ab = 1`` or ``c_ab = V_a W_b`` for the two-vector variant.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Literal

import numpy as np

from .errors import ModelError, ShapeMismatchError
from .hadamard import HadamardVerdict, build_P, is_generalized_hadamard, is_vw_hadamard
from .numerics import (DEFAULT_TOL, Tolerance, cmatrix, identity, int_power, inverse, kron,
                       rel_residual, unit_matrix)

Branch = Literal["plus", "minus"]


@dataclass(frozen=True, eq=False)
class ModelSpec:
    n: int
    lambdas: np.ndarray
    exponents: tuple[int, ...]
    branch: Branch = "plus"
    vw: tuple[np.ndarray, np.ndarray] | None = None
    h: np.ndarray | None = None

    def __post_init__(self):
        n = int(self.n)
        if n < 1:
            raise ModelError("n must be >= 1")
        lambdas = np.asarray(self.lambdas, dtype=np.complex128).ravel()
        if lambdas.size != n:
            raise ModelError(f"expected {n} eigenvalues, got {lambdas.size}")
        if len(self.exponents) != n:
            raise ModelError(f"expected {n} exponents, got {len(self.exponents)}")
        for e in self.exponents:
            if int(e) != e:
                raise ModelError(f"exponent {e!r} is not an integer")
        if np.any(lambdas == 0):
            raise ModelError("eigenvalues must be nonzero")
        if n > 1:
            gaps = np.abs(lambdas[:, None] - lambdas[None, :]) + np.eye(n)
            if np.min(gaps) == 0:
                raise ModelError("eigenvalues must be pairwise distinct")
        if self.branch not in ("plus", "minus"):
            raise ModelError(f"branch must be 'plus' or 'minus', got {self.branch!r}")
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "lambdas", lambdas)
        object.__setattr__(self, "exponents", tuple(int(e) for e in self.exponents))
        if self.vw is not None:
            v, w = (np.asarray(x, dtype=np.complex128).ravel() for x in self.vw)
            if v.size != n or w.size != n:
                raise ModelError("V and W must have length n")
            if np.any(v == 0) or np.any(w == 0):
                raise ModelError("V and W entries must be nonzero")
            object.__setattr__(self, "vw", (v, w))
        if self.h is not None:
            h = cmatrix(self.h)
            if h.shape != (n, n):
                raise ModelError(f"H must be {n}x{n}")
            object.__setattr__(self, "h", h)

    @property
    def weights(self) -> np.ndarray:
        """Coefficient matrix ``c_ab`` of the generator."""
        if self.vw is None:
            return np.ones((self.n, self.n), dtype=np.complex128)
        v, w = self.vw
        return np.outer(v, w)

    @property
    def vw_trace(self) -> complex:
        """``tr(WV)``; equals ``n`` for the plain model."""
        if self.vw is None:
            return complex(self.n)
        v, w = self.vw
        return complex(np.sum(v * w))


def fourier_model(n: int, branch: Branch = "plus", vw=None, h=None) -> ModelSpec:
    """Model whose eigenvalues are the n-th roots of unity with exponents 0..n-1."""
    lambdas = np.exp(2j * np.pi * np.arange(n) / n)
    return ModelSpec(n, lambdas, tuple(range(n)), branch, vw, h)


@dataclass(frozen=True, eq=False)
class TLData:
    spec: ModelSpec
    omega: np.ndarray
    qprime: complex
    q: complex
    lambda_diag: np.ndarray
    p: np.ndarray
    m: np.ndarray
    t_gen: np.ndarray
    x_gen: np.ndarray
    s_basis: np.ndarray
    s_inv: np.ndarray = field(repr=False)

    @property
    def n(self) -> int:
        return self.spec.n

    @property
    def vw_trace(self) -> complex:
        return self.spec.vw_trace

    @property
    def vw_scale(self) -> complex:
        """``tr(WV) / n``: the factor by which the two-vector generator exceeds a TL(sqrt n) generator."""
        return self.spec.vw_trace / self.spec.n


def build_master_matrix(spec: ModelSpec) -> np.ndarray:
    """``Omega_ab = lambda_a ** n_b``."""
    n = spec.n
    omega = np.empty((n, n), dtype=np.complex128)
    for a in range(n):
        for b in range(n):
            omega[a, b] = int_power(spec.lambdas[a], spec.exponents[b])
    return omega


def sum_rule_matrix(spec: ModelSpec) -> np.ndarray:
    """``G_rj = sum_i V_i W_i (lambda_j / lambda_r) ** n_i``; Hadamard models give ``tr(WV) I``."""
    n = spec.n
    vw = np.diag(spec.weights) if spec.vw is not None else np.ones(n)
    g = np.empty((n, n), dtype=np.complex128)
    for r in range(n):
        for j in range(n):
            ratio = spec.lambdas[j] / spec.lambdas[r]
            g[r, j] = sum(vw[i] * int_power(ratio, spec.exponents[i]) for i in range(n))
    return g


@dataclass(frozen=True)
class ModelVerdict(HadamardVerdict):
    matrix_residual: float = 0.0
    sum_rule_residual: float = 0.0
    matrix_passes: bool = False
    sum_rule_passes: bool = False


def validate_model(spec: ModelSpec, tol: Tolerance = DEFAULT_TOL) -> ModelVerdict:
    """Hadamard-type check of the Master matrix, paired with the sum rule.

    The reported residual is the worse of the two routes.
    """
    omega = build_master_matrix(spec)
    if spec.vw is None:
        matrix = is_generalized_hadamard(omega, tol)
    else:
        matrix = is_vw_hadamard(omega, *spec.vw, tol)
    sum_res = rel_residual(sum_rule_matrix(spec), spec.vw_trace * identity(spec.n))
    residual = max(matrix.residual, sum_res)
    return ModelVerdict(
        passes=bool(residual <= tol.eps_rel),
        residual=residual,
        property=matrix.property,
        matrix_residual=matrix.residual,
        sum_rule_residual=sum_res,
        matrix_passes=bool(matrix.passes),
        sum_rule_passes=bool(sum_res <= tol.eps_rel),
    )


def solve_qprime(n: int, branch: Branch = "plus") -> complex:
    """Root of ``z**2 + sqrt(n) z + 1 = 0``; the two branches are mutual inverses."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if branch not in ("plus", "minus"):
        raise ValueError(f"unknown branch {branch!r}")
    root = np.sqrt(complex(n - 4))
    sign = 1.0 if branch == "plus" else -1.0
    return complex((-np.sqrt(n) + sign * root) / 2.0)


def master_basis(spec: ModelSpec, omega: np.ndarray | None = None) -> np.ndarray:
    """Columns are the Master basis vectors ``v_(j)``, i.e. ``S = Omega^t`` (``(Omega_V)^t`` with V, W)."""
    if omega is None:
        omega = build_master_matrix(spec)
    if spec.vw is None:
        return omega.T.copy()
    v, _ = spec.vw
    return (omega * v[None, :]).T


def _m_power(spec: ModelSpec, p: np.ndarray, p_inv: np.ndarray, k: int) -> np.ndarray:
    diag = np.array([int_power(lam, k) for lam in spec.lambdas])
    return p @ np.diag(diag) @ p_inv


def build_tl_data(spec: ModelSpec, tol: Tolerance = DEFAULT_TOL) -> TLData:
    n = spec.n
    omega = build_master_matrix(spec)
    qprime = solve_qprime(n, spec.branch)
    lam = np.diag(spec.lambdas)
    if spec.h is not None:
        p = build_P(omega, spec.h, tol)
    else:
        p = identity(n)
    p_inv = inverse(p, tol)
    m = p @ lam @ p_inv
    weights = spec.weights
    t_gen = np.zeros((n * n, n * n), dtype=np.complex128)
    powers: dict[int, np.ndarray] = {}
    for a in range(n):
        for b in range(n):
            k = spec.exponents[a] - spec.exponents[b]
            if k not in powers:
                powers[k] = _m_power(spec, p, p_inv, k)
            t_gen += weights[a, b] * kron(unit_matrix(n, a, b), powers[k])
    s = master_basis(spec, omega)
    return TLData(
        spec=spec,
        omega=omega,
        qprime=qprime,
        q=np.sqrt(n) * qprime,
        lambda_diag=lam,
        p=p,
        m=m,
        t_gen=t_gen,
        x_gen=t_gen / np.sqrt(n),
        s_basis=s,
        s_inv=inverse(s, tol),
    )


def tl_check(data: TLData, tol: Tolerance = DEFAULT_TOL, four_sites: bool = False) -> dict:
    """Residuals of the Temperley-Lieb relations for the normalised generator.

    The generator is ``e = X / c`` with ``c = tr(WV)/n`` (``c = 1`` for the
    plain model), checked against ``e^2 = -(q' + 1/q') e``, ``e1 e2 e1 = e1``,
    ``e2 e1 e2 = e2`` and, optionally, ``[e1, e3] = 0`` on four sites.
    """
    n = data.n
    e = data.x_gen / data.vw_scale
    one = identity(n)
    loop = -(data.qprime + 1.0 / data.qprime)
    e1 = kron(e, one)
    e2 = kron(one, e)
    out = {
        "idempotent": rel_residual(e @ e, loop * e),
        "braid_121": rel_residual(e1 @ e2 @ e1, e1),
        "braid_212": rel_residual(e2 @ e1 @ e2, e2),
    }
    if four_sites:
        one2 = identity(n * n)
        f1 = kron(e, one2)
        f3 = kron(one2, e)
        out["far_commute"] = rel_residual(f1 @ f3, f3 @ f1)
    out["passes"] = bool(all(v <= tol.eps_rel for v in out.values()))
    return out
