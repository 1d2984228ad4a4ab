"""Dense complex linear algebra kernel.

Every operator in the package is a two-dimensional ``complex128`` numpy
array.  Tensor products follow the row-major convention of ``numpy.kron``:
site 1 is the leftmost factor, so basis vector ``e_i (x) e_j`` of
``C^n (x) C^n`` sits at flat index ``i * n + j``.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, replace
from typing import Callable, Sequence

import numpy as np
import scipy.linalg

from .errors import NewtonFailError, ShapeMismatchError, SingularMatrixError


@dataclass(frozen=True)
class Tolerance:
    eps_rel: float = 1e-9
    eps_rank: float = 1e-8
    eps_newton: float = 1e-12
    fd_step: float = 1e-6

    def __post_init__(self):
        for name in ("eps_rel", "eps_rank", "eps_newton", "fd_step"):
            value = getattr(self, name)
            if not (np.isfinite(value) and value > 0):
                raise ValueError(f"tolerance {name} must be strictly positive, got {value!r}")

    def with_(self, **changes) -> "Tolerance":
        return replace(self, **changes)


DEFAULT_TOL = Tolerance()


def cmatrix(data) -> np.ndarray:
    """Coerce ``data`` to a finite 2-d complex matrix."""
    a = np.array(data, dtype=np.complex128)
    if a.ndim == 0:
        a = a.reshape(1, 1)
    if a.ndim != 2 or a.shape[0] < 1 or a.shape[1] < 1:
        raise ShapeMismatchError(f"expected a non-empty 2-d matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix has non-finite entries")
    return a


def identity(n: int) -> np.ndarray:
    return np.eye(n, dtype=np.complex128)


def unit_matrix(n: int, i: int, j: int) -> np.ndarray:
    """Matrix unit ``e_ij`` (0-based indices)."""
    e = np.zeros((n, n), dtype=np.complex128)
    e[i, j] = 1.0
    return e


def kron(a, b) -> np.ndarray:
    return np.kron(cmatrix(a), cmatrix(b))


def permutation_op(n: int) -> np.ndarray:
    """Swap operator on ``C^n (x) C^n``: ``P (u (x) v) = v (x) u``."""
    if n < 1:
        raise ValueError("n must be >= 1")
    p = np.zeros((n * n, n * n), dtype=np.complex128)
    i, j = np.divmod(np.arange(n * n), n)
    p[i * n + j, j * n + i] = 1.0
    return p


def int_power(z: complex, k: int) -> complex:
    """``z**k`` for integer ``k`` by repeated squaring; negative ``k`` inverts first."""
    k = int(k)
    z = complex(z)
    if k < 0:
        if z == 0:
            raise ZeroDivisionError("zero raised to a negative power")
        z = 1.0 / z
        k = -k
    result = 1.0 + 0.0j
    while k:
        if k & 1:
            result *= z
        z *= z
        k >>= 1
    return result


def inverse(a, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """Inverse through an LU factorisation with partial pivoting.

    Raises :class:`SingularMatrixError` when a pivot falls below
    ``eps_rank * max|a_ij|``.
    """
    a = cmatrix(a)
    if a.shape[0] != a.shape[1]:
        raise ShapeMismatchError(f"inverse needs a square matrix, got {a.shape}")
    scale = np.max(np.abs(a))
    if scale == 0:
        raise SingularMatrixError("zero matrix")
    with warnings.catch_warnings():
        # exact zero pivots are reported through SingularMatrixError below
        warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
        lu, piv = scipy.linalg.lu_factor(a, check_finite=False)
    pivots = np.abs(np.diag(lu))
    if np.min(pivots) <= tol.eps_rank * scale:
        raise SingularMatrixError(
            f"pivot {np.min(pivots):.3e} below {tol.eps_rank:.1e} * max|entry| ({scale:.3e})"
        )
    return scipy.linalg.lu_solve((lu, piv), np.eye(a.shape[0], dtype=np.complex128))


def fro(a) -> float:
    return float(np.linalg.norm(a))


def rel_residual(lhs, rhs) -> float:
    """``||lhs - rhs||_F / (1 + ||lhs||_F + ||rhs||_F)``."""
    lhs = np.asarray(lhs, dtype=np.complex128)
    rhs = np.asarray(rhs, dtype=np.complex128)
    if lhs.shape != rhs.shape:
        raise ShapeMismatchError(f"shape mismatch {lhs.shape} vs {rhs.shape}")
    return fro(lhs - rhs) / (1.0 + fro(lhs) + fro(rhs))


def numeric_rank(a, tol: Tolerance = DEFAULT_TOL) -> int:
    """Rank by Gaussian elimination with complete pivoting.

    A pivot counts when it exceeds ``eps_rank * max|a_ij| * max(rows, cols)``
    measured on the input matrix.
    """
    w = np.array(a, dtype=np.complex128)
    if w.ndim != 2:
        raise ShapeMismatchError("numeric_rank needs a 2-d array")
    rows, cols = w.shape
    scale = np.max(np.abs(w)) if w.size else 0.0
    if scale == 0:
        return 0
    threshold = tol.eps_rank * scale * max(rows, cols)
    rank = 0
    for k in range(min(rows, cols)):
        sub = np.abs(w[k:, k:])
        i, j = np.unravel_index(np.argmax(sub), sub.shape)
        if sub[i, j] <= threshold:
            break
        i += k
        j += k
        w[[k, i], :] = w[[i, k], :]
        w[:, [k, j]] = w[:, [j, k]]
        factors = w[k + 1:, k] / w[k, k]
        w[k + 1:, k:] -= np.outer(factors, w[k, k:])
        rank += 1
    return rank


def fd_jacobian(f: Callable[[np.ndarray], np.ndarray], x, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """Central-difference Jacobian of a real vector function."""
    x = np.asarray(x, dtype=float).ravel()
    h = tol.fd_step
    columns = []
    for j in range(x.size):
        step = np.zeros_like(x)
        step[j] = h
        fp = np.asarray(f(x + step), dtype=float).ravel()
        fm = np.asarray(f(x - step), dtype=float).ravel()
        columns.append((fp - fm) / (2.0 * h))
    if not columns:
        return np.zeros((np.asarray(f(x)).size, 0), dtype=np.complex128)
    return np.column_stack(columns).astype(np.complex128)


# -- complex <-> real packing ------------------------------------------------

def realify(*arrays: np.ndarray) -> np.ndarray:
    """Flatten complex arrays into one real vector ``[re..., im...]``."""
    flat = np.concatenate([np.asarray(a, dtype=np.complex128).ravel() for a in arrays])
    return np.concatenate([flat.real, flat.imag])


def complexify(x: np.ndarray, shapes: Sequence[tuple]) -> list[np.ndarray]:
    """Inverse of :func:`realify` for the given shapes."""
    x = np.asarray(x, dtype=float)
    half = x.size // 2
    z = x[:half] + 1j * x[half:]
    out, pos = [], 0
    for shape in shapes:
        size = int(np.prod(shape))
        out.append(z[pos:pos + size].reshape(shape))
        pos += size
    return out


def random_complex(rng: np.random.Generator, shape) -> np.ndarray:
    """Independent standard complex Gaussians (unit variance)."""
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)


# -- Gauss-Newton --------------------------------------------------------------

def gauss_newton(residual: Callable[[np.ndarray], np.ndarray], x0, tol: Tolerance = DEFAULT_TOL,
                 max_iter: int = 100) -> tuple[np.ndarray, float]:
    """Damped Gauss-Newton with backtracking on ``||residual(x)||``.

    Steps are minimum-norm least-squares solutions, so underdetermined
    systems converge to a nearby point of the solution set.  Returns the
    final point and residual norm; the caller decides on success.
    """
    x = np.asarray(x0, dtype=float).copy()
    r = np.asarray(residual(x), dtype=float)
    norm = float(np.linalg.norm(r))
    for _ in range(max_iter):
        if norm <= tol.eps_newton:
            break
        jac = fd_jacobian(residual, x, tol).real
        delta = np.linalg.lstsq(jac, -r, rcond=None)[0]
        alpha = 1.0
        while alpha > 1e-10:
            trial = x + alpha * delta
            r_trial = np.asarray(residual(trial), dtype=float)
            norm_trial = float(np.linalg.norm(r_trial))
            if np.isfinite(norm_trial) and norm_trial < (1.0 - 1e-4 * alpha) * norm:
                break
            alpha *= 0.5
        else:
            break
        x, r, norm = trial, r_trial, norm_trial
    return x, norm


def solve_with_restarts(residual: Callable[[np.ndarray], np.ndarray],
                        draw_start: Callable[[np.random.Generator], np.ndarray],
                        rng: np.random.Generator, tol: Tolerance = DEFAULT_TOL,
                        accept: Callable[[np.ndarray], bool] | None = None,
                        max_restarts: int = 20, max_iter: int = 100) -> np.ndarray:
    """Run :func:`gauss_newton` from fresh random starts until one converges."""
    best = np.inf
    for _ in range(max_restarts):
        x, norm = gauss_newton(residual, draw_start(rng), tol, max_iter=max_iter)
        best = min(best, norm)
        if norm <= tol.eps_newton and (accept is None or accept(x)):
            return x
    raise NewtonFailError(f"no acceptable solution after {max_restarts} restarts (best residual {best:.3e})")
