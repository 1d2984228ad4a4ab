"""Constant K-matrices from the block classification.

In the Master basis a solution is ``K = D + K^o``: the diagonal ``D`` groups
indices into classes of equal value ``d`` and ``K^o`` is block diagonal over
those classes with zero diagonal.  Within a class the off-diagonal block
obeys ``(q/n) (K^o)^2 + (1 + 2q/n) d K^o = diagonal``, hence

* ``d = 0``: sub-blocks with ``(K^o)^2 = delta' I``, either nilpotent
  (``delta' = 0``, ``K^o = A B^t`` with ``B^t A = 0``) or involutive up to
  scale (``K^o = sqrt(delta') (I - 2 A (B^t A)^{-1} B^t)``);
* ``d != 0``: ``K^o = ((n + 2q) d / q) W`` with ``W^2 + W = delta_s I`` and
  ``W = z2 I + (z1 - z2) A (B^t A)^{-1} B^t``.

Every realized block has zero diagonal.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Literal

import numpy as np

from .errors import (BadShapeError, DegenerateCoefficientError, DegenerateSplitError,
                     NewtonFailError, OddSizeError, PlanError, RankUnstableError,
                     SingularCrossError, SingularMatrixError)
from .model import TLData
from .numerics import (DEFAULT_TOL, Tolerance, complexify, fd_jacobian, fro, identity, inverse,
                       numeric_rank, random_complex, realify, solve_with_restarts)
from .reflection import from_master

Kind = Literal["Zero", "Nilpotent", "Involution", "TwoEigen"]

_RNGLike = int | np.random.Generator | np.random.SeedSequence | None


def _rng(seed: _RNGLike) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


@dataclass(frozen=True, eq=False)
class SubBlock:
    """One diagonal sub-block of ``K^o``.

    ``params`` holds ``t, m`` (Nilpotent), ``s, delta_prime`` (Involution)
    or ``s, m_prime`` (TwoEigen).  ``a``, ``b`` and ``block`` are filled in by
    the samplers; for TwoEigen ``block`` is the universal ``W`` before the
    class scaling.
    """
    kind: Kind
    size: int
    params: dict = field(default_factory=dict)
    generic: bool = False
    a: np.ndarray | None = None
    b: np.ndarray | None = None
    block: np.ndarray | None = None

    @property
    def sampled(self) -> bool:
        return self.kind == "Zero" or self.block is not None

    def label(self) -> str:
        if self.kind == "Zero":
            return f"Zero({self.size})"
        if self.kind == "Involution":
            dp = self.params["delta_prime"]
            return f"Involution({self.size})" if dp == 1 else f"Involution({self.size},delta'={dp:g})"
        args = ",".join(str(v) for v in self.params.values())
        return f"{self.kind}({args})"


def Zero(size: int) -> SubBlock:
    if size < 1:
        raise BadShapeError("Zero block size must be >= 1")
    return SubBlock("Zero", size)


def Nilpotent(t: int, m: int, generic: bool = False) -> SubBlock:
    if m < 1 or 2 * m > t:
        raise BadShapeError(f"Nilpotent needs 1 <= m and 2m <= t, got t={t}, m={m}")
    return SubBlock("Nilpotent", t, {"t": t, "m": m}, generic)


def Involution(s: int, delta_prime: complex = 1.0, generic: bool = False) -> SubBlock:
    if s % 2:
        raise OddSizeError(f"involution block size must be even, got {s}")
    if s < 2:
        raise BadShapeError("involution block size must be >= 2")
    if delta_prime == 0:
        raise PlanError("delta_prime must be nonzero (use Nilpotent for delta' = 0)")
    return SubBlock("Involution", s, {"s": s, "delta_prime": complex(delta_prime)}, generic)


def TwoEigen(s: int, m_prime: int, generic: bool = False) -> SubBlock:
    eigen_pair(s, m_prime)
    return SubBlock("TwoEigen", s, {"s": s, "m_prime": m_prime}, generic)


@dataclass(frozen=True, eq=False)
class DClass:
    """Indices sharing one diagonal value ``d``; ``d=None`` means ``q/(n+2q)``."""
    d: complex | None
    subblocks: tuple[SubBlock, ...]

    def __post_init__(self):
        object.__setattr__(self, "subblocks", tuple(self.subblocks))
        if not self.subblocks:
            raise PlanError("a class needs at least one sub-block")
        zero_d = self.d is not None and self.d == 0
        for sub in self.subblocks:
            if zero_d and sub.kind == "TwoEigen":
                raise PlanError("a d = 0 class admits only Zero, Nilpotent and Involution blocks")
            if not zero_d and sub.kind in ("Nilpotent", "Involution"):
                raise PlanError("a d != 0 class admits only Zero and TwoEigen blocks")

    @property
    def size(self) -> int:
        return sum(s.size for s in self.subblocks)


@dataclass(frozen=True, eq=False)
class KBlockPlan:
    classes: tuple[DClass, ...]

    def __post_init__(self):
        object.__setattr__(self, "classes", tuple(self.classes))
        if sum(1 for c in self.classes if c.d is not None and c.d == 0) > 1:
            raise PlanError("at most one class may have d = 0")

    @property
    def size(self) -> int:
        return sum(c.size for c in self.classes)


# -- block algebra -------------------------------------------------------------

def eigen_pair(s: int, m_prime: int) -> tuple[float, float]:
    """Eigenvalues ``(z1, z2)`` of a traceless block with ``W^2 + W`` scalar."""
    if not 1 <= m_prime < s:
        raise BadShapeError(f"need 1 <= m' < s, got s={s}, m'={m_prime}")
    if s == 2 * m_prime:
        raise DegenerateSplitError(f"s = 2m' = {s} has no traceless two-eigenvalue solution")
    return (m_prime - s) / (s - 2 * m_prime), m_prime / (s - 2 * m_prime)


def _cross_projector(a: np.ndarray, b: np.ndarray, tol: Tolerance) -> np.ndarray:
    """``A (B^t A)^{-1} B^t``."""
    try:
        inv = inverse(b.T @ a, tol)
    except SingularMatrixError as exc:
        raise SingularCrossError(str(exc)) from None
    return a @ inv @ b.T


def _realize(kind: Kind, params: dict, a: np.ndarray, b: np.ndarray, tol: Tolerance) -> np.ndarray:
    if kind == "Nilpotent":
        return a @ b.T
    proj = _cross_projector(a, b, tol)
    s = params["s"]
    if kind == "Involution":
        return np.sqrt(params["delta_prime"]) * (identity(s) - 2.0 * proj)
    z1, z2 = eigen_pair(s, params["m_prime"])
    return z2 * identity(s) + (z1 - z2) * proj


def _check_diagonal(block: np.ndarray, what: str, atol: float) -> None:
    scale = 1.0 + fro(block)
    if np.max(np.abs(np.diag(block))) > atol * scale:
        raise NewtonFailError(f"{what}: diagonal not zero ({np.max(np.abs(np.diag(block))):.3e})")


def _diag_constraint(kind: Kind, params: dict, tol: Tolerance):
    """Real constraint map over realified ``(A, B)`` for the Newton solvers."""
    if kind == "Nilpotent":
        t, m = params["t"], params["m"]
        shapes = [(t, m), (t, m)]

        def f(x):
            a, b = complexify(x, shapes)
            return realify(b.T @ a, np.einsum("ia,ia->i", a, b))
        return f, shapes

    s = params["s"]
    m = s // 2 if kind == "Involution" else params["m_prime"]
    target = m / s
    shapes = [(s, m), (s, m)]

    def f(x):
        a, b = complexify(x, shapes)
        inv = np.linalg.solve(b.T @ a, np.eye(m))
        return realify(np.einsum("ia,ab,ib->i", a, inv, b) - target)
    return f, shapes


def _newton_payload(kind: Kind, params: dict, rng: np.random.Generator, tol: Tolerance):
    f, shapes = _diag_constraint(kind, params, tol)
    size = shapes[0][0]
    rank = shapes[0][1]

    def draw(g):
        return realify(*(random_complex(g, sh) for sh in shapes))

    def acceptable(x):
        a, b = complexify(x, shapes)
        if numeric_rank(a, tol) < rank or numeric_rank(b, tol) < rank:
            return False
        if kind == "Nilpotent":
            return numeric_rank(a @ b.T, tol) == rank
        return np.linalg.cond(b.T @ a) < 1e8

    def safe(x):
        try:
            return f(x)
        except np.linalg.LinAlgError:
            return np.full(2 * size if kind != "Nilpotent" else 2 * (rank * rank + size), np.inf)

    x = solve_with_restarts(safe, draw, rng, tol, accept=acceptable)
    return complexify(x, shapes)


def sample_nilpotent(t: int, m: int, seed: _RNGLike = None, generic: bool = False,
                     tol: Tolerance = DEFAULT_TOL) -> SubBlock:
    sub = Nilpotent(t, m, generic)
    rng = _rng(seed)
    if generic:
        a, b = _newton_payload("Nilpotent", sub.params, rng, tol)
    else:
        a = np.zeros((t, m), dtype=np.complex128)
        b = np.zeros((t, m), dtype=np.complex128)
        while True:
            top = random_complex(rng, (m, m))
            if numeric_rank(top, tol) == m:
                break
        a[:m] = top
        b[m:2 * m] = random_complex(rng, (m, m))
    block = a @ b.T
    _check_diagonal(block, "nilpotent", 1e-12)
    return replace(sub, a=a, b=b, block=block)


def sample_involution(s: int, delta_prime: complex = 1.0, seed: _RNGLike = None,
                      generic: bool = False, tol: Tolerance = DEFAULT_TOL) -> SubBlock:
    """Zero-diagonal block squaring to ``delta_prime * I``.

    The canonical sampler is a direct sum of ``[[0, x], [1/x, 0]]`` pieces.
    """
    sub = Involution(s, delta_prime, generic)
    rng = _rng(seed)
    half = s // 2
    if generic:
        a, b = _newton_payload("Involution", sub.params, rng, tol)
    else:
        a = np.zeros((s, half), dtype=np.complex128)
        b = np.zeros((s, half), dtype=np.complex128)
        x = random_complex(rng, half)
        x = np.where(np.abs(x) < 1e-3, 1.0, x)
        for i in range(half):
            # (x, -1) spans the -1 eigenspace of [[0, x], [1/x, 0]]; (1, -x) annihilates (x, 1).
            a[2 * i, i], a[2 * i + 1, i] = x[i], -1.0
            b[2 * i, i], b[2 * i + 1, i] = 1.0, -x[i]
    block = _realize("Involution", sub.params, a, b, tol)
    _check_diagonal(block, "involution", 1e-10)
    return replace(sub, a=a, b=b, block=block)


def sample_two_eigen(s: int, m_prime: int, seed: _RNGLike = None, generic: bool = False,
                     tol: Tolerance = DEFAULT_TOL) -> SubBlock:
    """Universal traceless block ``W`` with eigenvalue ``z1`` of multiplicity ``m_prime``.

    For ``m_prime == 1`` (and not ``generic``) the closed form ``b_i = 1/a_i``
    is used; otherwise ``diag(A (B^t A)^{-1} B^t) = m'/s`` is solved by
    Gauss-Newton.
    """
    sub = TwoEigen(s, m_prime, generic)
    rng = _rng(seed)
    if m_prime == 1 and not generic:
        a = random_complex(rng, (s, 1))
        a = np.where(np.abs(a) < 1e-3, 1.0, a)
        b = 1.0 / a
    else:
        a, b = _newton_payload("TwoEigen", sub.params, rng, tol)
    block = _realize("TwoEigen", sub.params, a, b, tol)
    _check_diagonal(block, "two-eigenvalue", 1e-10)
    return replace(sub, a=a, b=b, block=block)


def sample_subblock(sub: SubBlock, seed: _RNGLike = None, tol: Tolerance = DEFAULT_TOL) -> SubBlock:
    if sub.kind == "Zero":
        return sub
    if sub.kind == "Nilpotent":
        return sample_nilpotent(sub.params["t"], sub.params["m"], seed, sub.generic, tol)
    if sub.kind == "Involution":
        return sample_involution(sub.params["s"], sub.params["delta_prime"], seed, sub.generic, tol)
    return sample_two_eigen(sub.params["s"], sub.params["m_prime"], seed, sub.generic, tol)


def block_equation_residual(sub: SubBlock) -> float:
    """Residual of the defining quadratic of a realized block.

    Nilpotent: ``N^2 = 0``; Involution: ``K^2 = delta' I``; TwoEigen:
    ``W^2 + W = -z1 z2 I``.  Normalised by ``1 + ||block||_F^2``.
    """
    blk = sub.block
    if sub.kind == "Zero":
        return 0.0
    if sub.kind == "Nilpotent":
        err = blk @ blk
    elif sub.kind == "Involution":
        err = blk @ blk - sub.params["delta_prime"] * identity(sub.size)
    else:
        z1, z2 = eigen_pair(sub.params["s"], sub.params["m_prime"])
        err = blk @ blk + blk + z1 * z2 * identity(sub.size)
    return fro(err) / (1.0 + fro(blk) ** 2)


def gauge_transform(sub: SubBlock, u, v=None, tol: Tolerance = DEFAULT_TOL) -> SubBlock:
    """Change bases of the parametrizing matrices.

    Nilpotent: ``A -> A U``, ``B -> B (U^{-1})^t`` (``v`` must be omitted).
    Involution/TwoEigen: ``A -> A U``, ``B -> B V`` (``V = I`` if omitted).
    """
    if sub.kind == "Zero":
        return sub
    if not sub.sampled:
        raise PlanError("sub-block has not been sampled")
    u = np.asarray(u, dtype=np.complex128)
    u_inv = inverse(u, tol)
    if sub.kind == "Nilpotent":
        if v is not None:
            raise ValueError("nilpotent gauge takes a single matrix")
        a, b = sub.a @ u, sub.b @ u_inv.T
    else:
        v = identity(u.shape[0]) if v is None else np.asarray(v, dtype=np.complex128)
        inverse(v, tol)
        a, b = sub.a @ u, sub.b @ v
    return replace(sub, a=a, b=b, block=_realize(sub.kind, sub.params, a, b, tol))


def scaling_coefficient(d: complex, q: complex, n: int, tol: Tolerance = DEFAULT_TOL) -> complex:
    """``(n + 2q) d / q``: maps a universal block to the class with diagonal ``d``."""
    if abs(1.0 + 2.0 * q / n) <= tol.eps_rank:
        raise DegenerateCoefficientError(f"n + 2q = {n + 2 * q} vanishes for n={n}")
    return (n + 2.0 * q) * d / q


def canonical_d(q: complex, n: int, tol: Tolerance = DEFAULT_TOL) -> complex:
    """The ``d`` for which :func:`scaling_coefficient` equals 1."""
    if abs(1.0 + 2.0 * q / n) <= tol.eps_rank:
        raise DegenerateCoefficientError(f"n + 2q = {n + 2 * q} vanishes for n={n}; no canonical d")
    return q / (n + 2.0 * q)


def scale_block(w, d: complex, q: complex, n: int, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    if d == 0:
        raise ValueError("scale_block needs d != 0")
    return scaling_coefficient(d, q, n, tol) * np.asarray(w, dtype=np.complex128)


def class_equation_residual(block, d: complex, q: complex, n: int) -> float:
    """Off-diagonal part of ``(q/n) B^2 + (1 + 2q/n) d B``, normalised.

    Zero exactly when a class with diagonal ``d`` and off-diagonal block ``B``
    satisfies the component equations.
    """
    blk = np.asarray(block, dtype=np.complex128)
    lhs = (q / n) * blk @ blk + (1.0 + 2.0 * q / n) * d * blk
    off = lhs - np.diag(np.diag(lhs))
    return fro(off) / (1.0 + fro(blk) ** 2)


@dataclass(frozen=True, eq=False)
class AssembledK:
    k_master: np.ndarray
    k_original: np.ndarray
    plan: KBlockPlan
    permutation: np.ndarray | None = None

    def __iter__(self):
        yield self.k_master
        yield self.k_original


def assemble_K(plan: KBlockPlan, data: TLData, seed: _RNGLike = None, permute: bool = False,
               tol: Tolerance = DEFAULT_TOL) -> AssembledK:
    """Sample every sub-block and build ``K`` in the Master and original bases.

    Blocks are laid out contiguously in plan order.  With ``permute`` the
    Master-basis matrix is additionally conjugated by a random permutation.
    """
    n = data.n
    if plan.size != n:
        raise PlanError(f"plan covers {plan.size} indices, model has n={n}")
    subs = [sub for cls in plan.classes for sub in cls.subblocks]
    root = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(
        seed if not isinstance(seed, np.random.Generator) else seed.integers(2**63))
    children = root.spawn(len(subs) + 1)
    k = np.zeros((n, n), dtype=np.complex128)
    new_classes = []
    pos = 0
    idx = 0
    for cls in plan.classes:
        d = canonical_d(data.q, n, tol) if cls.d is None else complex(cls.d)
        sampled = []
        for sub in cls.subblocks:
            if not sub.sampled:
                sub = sample_subblock(sub, np.random.default_rng(children[idx]), tol)
            idx += 1
            sl = slice(pos, pos + sub.size)
            k[sl, sl] = d * identity(sub.size)
            if sub.kind != "Zero":
                blk = sub.block if d == 0 else scale_block(sub.block, d, data.q, n, tol)
                k[sl, sl] += blk
            sampled.append(sub)
            pos += sub.size
        new_classes.append(DClass(d, tuple(sampled)))
    perm = None
    if permute:
        perm = np.random.default_rng(children[-1]).permutation(n)
        k = k[np.ix_(perm, perm)]
    return AssembledK(k, from_master(data, k), KBlockPlan(tuple(new_classes)), perm)


# -- moduli --------------------------------------------------------------------

def moduli_dim(kind: Kind, **params) -> int:
    """Closed-form complex dimension of the moduli space of a block family."""
    if kind == "Nilpotent":
        t, m = params["t"], params["m"]
        if m < 1 or 2 * m > t:
            raise BadShapeError(f"invalid nilpotent parameters t={t}, m={m}")
        return 2 * m * (t - m) - t + 1
    if kind == "TwoEigen":
        s, mp = params["s"], params["m_prime"]
        if not 1 <= mp < s:
            raise BadShapeError(f"invalid two-eigenvalue parameters s={s}, m'={mp}")
        return 2 * mp * s - 2 * mp * mp - s + 1
    if kind == "Involution":
        s = params["s"]
        if s < 2 or s % 2:
            raise OddSizeError(f"involution size must be even and >= 2, got {s}")
        return moduli_dim("TwoEigen", s=s, m_prime=s // 2)
    raise ValueError(f"no moduli count for kind {kind!r}")


def _gauge_directions(sub: SubBlock) -> np.ndarray:
    """Real tangent vectors of the gauge orbit through ``(A, B)``, as columns."""
    a, b = sub.a, sub.b
    m = a.shape[1]
    basis = []
    for i in range(m):
        for j in range(m):
            for phase in (1.0, 1j):
                x = np.zeros((m, m), dtype=np.complex128)
                x[i, j] = phase
                basis.append(x)
    cols = []
    zero = np.zeros_like(a)
    for x in basis:
        if sub.kind == "Nilpotent":
            cols.append(realify(a @ x, -b @ x.T))
        else:
            cols.append(realify(a @ x, zero))
            cols.append(realify(zero, b @ x))
    return np.column_stack(cols)


def numeric_moduli_check(sub: SubBlock, tol: Tolerance = DEFAULT_TOL) -> dict:
    """Numerically count the moduli of the family through a sampled block.

    Tangent dimension of the constraint variety at ``(A, B)`` minus the
    dimension of the gauge orbit, compared with :func:`moduli_dim`.
    Dimensions are reported in real units and as complex dimensions
    (real / 2).
    """
    if sub.kind == "Zero" or not sub.sampled:
        raise PlanError("moduli check needs a sampled Nilpotent, Involution or TwoEigen block")
    f, _ = _diag_constraint(sub.kind, sub.params, tol)
    x = realify(sub.a, sub.b)
    constraint = float(np.linalg.norm(f(x)))
    rank = numeric_rank(fd_jacobian(f, x, tol), tol)
    rank_half = numeric_rank(fd_jacobian(f, x, tol.with_(fd_step=tol.fd_step / 2)), tol)
    if rank != rank_half:
        raise RankUnstableError(f"Jacobian rank {rank} vs {rank_half} under step halving")
    gauge = numeric_rank(_gauge_directions(sub), tol)
    tangent = x.size - rank
    moduli_real = tangent - gauge
    expected = moduli_dim(sub.kind, **{k: v for k, v in sub.params.items() if k != "delta_prime"})
    return {
        "kind": sub.kind,
        "params": {k: v for k, v in sub.params.items() if k != "delta_prime"},
        "constraint_residual": constraint,
        "real_params": int(x.size),
        "jacobian_rank": int(rank),
        "tangent_dim_real": int(tangent),
        "gauge_dim_real": int(gauge),
        "moduli_real": int(moduli_real),
        "moduli_complex": moduli_real / 2,
        "expected_complex": expected,
        "passes": bool(moduli_real == 2 * expected and constraint <= 1e3 * tol.eps_newton),
        "convention": "complex dimension = real dimension / 2",
    }
