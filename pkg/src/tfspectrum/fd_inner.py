"""Finite differences for the even inner problem on [0, 1].

The fourth-order equation -2(1 - x^2) w'' + eps^2 w'''' = gamma w is split as

    w'' = v,    eps^2 v'' - 2 (1 - x^2) v = gamma w,

and discretized with second-order central differences on x_k = k h,
k = 0..n-1, with Neumann data at x = 0 (ghost-point symmetry) and the values
w_n, v_n at x = 1 imposed.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import LinAlgError, lapack, solve_banded

from .special_fn import DomainError

DEFAULT_N = 200


class NearSingularError(ArithmeticError):
    """The coupled inner system is singular to working precision."""

    def __init__(self, message: str, rcond: float):
        super().__init__(message)
        self.rcond = rcond


@dataclass(frozen=True)
class Grid:
    n: int

    def __post_init__(self):
        if self.n < 3:
            raise DomainError(f"grid needs n >= 3, got {self.n}")

    @property
    def h(self) -> float:
        return 1.0 / self.n

    @property
    def nodes(self) -> np.ndarray:
        return np.arange(self.n) * self.h


@dataclass(frozen=True)
class TridiagonalMatrix:
    sub: np.ndarray
    diag: np.ndarray
    sup: np.ndarray

    def __post_init__(self):
        n = len(self.diag)
        if len(self.sub) != n - 1 or len(self.sup) != n - 1:
            raise ValueError("inconsistent tridiagonal band lengths")

    @property
    def order(self) -> int:
        return len(self.diag)

    def toarray(self) -> np.ndarray:
        return np.diag(self.diag) + np.diag(self.sub, -1) + np.diag(self.sup, 1)

    def matvec(self, y) -> np.ndarray:
        y = np.asarray(y, dtype=float)
        out = self.diag * y
        out[1:] += self.sub * y[:-1]
        out[:-1] += self.sup * y[1:]
        return out

    def banded(self) -> np.ndarray:
        ab = np.zeros((3, self.order))
        ab[0, 1:] = self.sup
        ab[1] = self.diag
        ab[2, :-1] = self.sub
        return ab

    def solve(self, b) -> np.ndarray:
        return solve_banded((1, 1), self.banded(), np.asarray(b, dtype=float))

    def scaled(self, s: float) -> "TridiagonalMatrix":
        return TridiagonalMatrix(s * self.sub, s * self.diag, s * self.sup)

    def shifted(self, d) -> "TridiagonalMatrix":
        return TridiagonalMatrix(self.sub.copy(), self.diag + d, self.sup.copy())


def build_a1(n: int) -> TridiagonalMatrix:
    """(1/h^2) tridiag(1, -2, 1) with first row [-2, 2] for w'(0) = 0."""
    grid = Grid(n)
    inv_h2 = 1.0 / grid.h ** 2
    sub = np.full(n - 1, inv_h2)
    sup = np.full(n - 1, inv_h2)
    sup[0] = 2.0 * inv_h2
    diag = np.full(n, -2.0 * inv_h2)
    return TridiagonalMatrix(sub, diag, sup)


def build_a2(n: int, eps: float) -> TridiagonalMatrix:
    """eps^2 A1 - 2 diag(1 - x_k^2)."""
    if eps < 0:
        raise DomainError(f"eps must be non-negative, got {eps}")
    x = Grid(n).nodes
    return build_a1(n).scaled(eps ** 2).shifted(-2.0 * (1.0 - x ** 2))


def one_sided_derivative(values_with_boundary: np.ndarray, h: float) -> float:
    """(3 f_n - 4 f_{n-1} + f_{n-2}) / (2h), exact on quadratics."""
    f = values_with_boundary
    return (3.0 * f[-1] - 4.0 * f[-2] + f[-3]) / (2.0 * h)


@dataclass(frozen=True)
class InnerBasis:
    """Two inner solutions on the grid plus their boundary values at x = 1.

    ``w1``/``v1`` etc. include the imposed boundary node x_n = 1 as last entry.
    ``d1`` = (w1'(1), w1'''(1)), ``d2`` = (w2'(1), w2'''(1)).
    """

    x: np.ndarray
    w1: np.ndarray
    v1: np.ndarray
    w2: np.ndarray
    v2: np.ndarray
    d1: tuple[float, float]
    d2: tuple[float, float]
    gamma: float
    eps: float
    rcond: float = field(default=np.nan, compare=False)

    @property
    def n(self) -> int:
        return len(self.x) - 1


def _block_banded(a1: TridiagonalMatrix, a2: TridiagonalMatrix, gamma: float) -> np.ndarray:
    """Interleaved (w0, v0, w1, v1, ...) storage of [[A1, -I], [-gamma I, A2]], bands (2, 2)."""
    n = a1.order
    N = 2 * n
    ab = np.zeros((5, N))
    # ab[2 + i - j, j] = M[i, j]
    def put(i, j, val):
        ab[2 + i - j, j] = val

    for k in range(n):
        rw, rv = 2 * k, 2 * k + 1
        put(rw, 2 * k, a1.diag[k])
        put(rw, 2 * k + 1, -1.0)
        put(rv, 2 * k, -gamma)
        put(rv, 2 * k + 1, a2.diag[k])
        if k > 0:
            put(rw, 2 * (k - 1), a1.sub[k - 1])
            put(rv, 2 * (k - 1) + 1, a2.sub[k - 1])
        if k < n - 1:
            put(rw, 2 * (k + 1), a1.sup[k])
            put(rv, 2 * (k + 1) + 1, a2.sup[k])
    return ab


def _banded_lu_solve(ab: np.ndarray, rhs: np.ndarray) -> tuple[np.ndarray, float]:
    """Solve with LAPACK gbtrf/gbtrs; also return a cheap reciprocal-condition proxy."""
    kl = ku = 2
    N = ab.shape[1]
    lu_in = np.zeros((2 * kl + ku + 1, N))
    lu_in[kl:, :] = ab
    lu, piv, info = lapack.dgbtrf(lu_in, kl, ku)
    if info > 0:
        raise NearSingularError("coupled inner system is exactly singular", 0.0)
    x, info = lapack.dgbtrs(lu, kl, ku, rhs, piv)
    if info != 0:
        raise LinAlgError(f"dgbtrs failed with info={info}")
    u_diag = np.abs(lu[kl + ku, :])
    rcond = float(u_diag.min() / u_diag.max())
    return x, rcond


def block_determinant_sign(eps: float, gamma: float, n: int = DEFAULT_N) -> float:
    """Sign of det [[A1, -I], [-gamma I, A2]] from its banded LU factors."""
    ab = _block_banded(build_a1(n), build_a2(n, eps), gamma)
    kl = ku = 2
    lu_in = np.zeros((2 * kl + ku + 1, ab.shape[1]))
    lu_in[kl:, :] = ab
    lu, piv, info = lapack.dgbtrf(lu_in, kl, ku)
    if info > 0:
        return 0.0
    swaps = int(np.count_nonzero(piv != np.arange(len(piv))))
    sign = -1.0 if swaps % 2 else 1.0
    return sign * float(np.prod(np.sign(lu[kl + ku, :])))


def solve_inner_basis(eps: float, gamma: float, n: int = DEFAULT_N,
                      rcond_floor: float = 1e-14) -> InnerBasis:
    """Both basis solutions (w1: w(1)=1, w''(1)=0; w2: w(1)=0, w''(1)=1)."""
    if not (0.0 < eps <= 0.1):
        raise DomainError(f"eps must lie in (0, 0.1], got {eps}")
    if gamma < 0:
        raise DomainError(f"gamma must be non-negative, got {gamma}")
    if n < 50:
        raise DomainError(f"inner grid needs n >= 50, got {n}")
    grid = Grid(n)
    h = grid.h
    a1 = build_a1(n)
    a2 = build_a2(n, eps)
    ab = _block_banded(a1, a2, gamma)

    # boundary injection: w_n enters the last w-row with 1/h^2,
    # v_n enters the last v-row with eps^2/h^2; both moved to the right side
    rhs = np.zeros((2 * n, 2))
    rhs[2 * n - 2, 0] = -1.0 / h ** 2
    rhs[2 * n - 1, 1] = -(eps ** 2) / h ** 2
    sol, rcond = _banded_lu_solve(ab, rhs)
    if rcond < rcond_floor:
        raise NearSingularError(
            f"coupled inner system near-singular at gamma={gamma}, eps={eps} (rcond~{rcond:.2e})",
            rcond,
        )

    w1 = np.append(sol[0::2, 0], 1.0)
    v1 = np.append(sol[1::2, 0], 0.0)
    w2 = np.append(sol[0::2, 1], 0.0)
    v2 = np.append(sol[1::2, 1], 1.0)
    x = np.append(grid.nodes, 1.0)
    d1 = (one_sided_derivative(w1, h), one_sided_derivative(v1, h))
    d2 = (one_sided_derivative(w2, h), one_sided_derivative(v2, h))
    return InnerBasis(x, w1, v1, w2, v2, d1, d2, float(gamma), float(eps), rcond)


def closed_form_basis(eps: float, gamma: float, n: int = DEFAULT_N):
    """Dense evaluation of the explicit inverse formulas; used as a test oracle.

    Returns (w1, v1, w2, v2) on the n interior-plus-origin nodes.
    """
    h = 1.0 / n
    A1 = build_a1(n).toarray()
    A2 = build_a2(n, eps).toarray()
    A2inv = np.linalg.inv(A2)
    K = A1 - gamma * A2inv
    e_n = np.zeros(n)
    e_n[-1] = 1.0
    w1 = -np.linalg.solve(K, e_n) / h ** 2
    v1 = gamma * A2inv @ w1
    w2 = -(eps ** 2 / h ** 2) * np.linalg.solve(K, A2inv @ e_n)
    v2 = gamma * A2inv @ w2 - (eps ** 2 / h ** 2) * A2inv @ e_n
    return w1, v1, w2, v2
