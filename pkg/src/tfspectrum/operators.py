"""Truncated-line Schroedinger operators, the gamma-pencil oracle, A_eps and A_0.

Operators are -d^2/dx^2 + V(x) on [-L, L] with Dirichlet ends, discretized by
central differences on m interior nodes (h = 2L / (m + 1)).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable

import numpy as np
import scipy.sparse as sp
from scipy.integrate import cumulative_simpson
from scipy.linalg import LinAlgError, cholesky_banded, eig_banded, eigh_tridiagonal

from .fd_inner import TridiagonalMatrix
from .special_fn import DomainError

DEFAULT_L = 2.5
MIN_POINTS = 100
POINTS_PER_LAYER = 10


class ResolutionError(ValueError):
    """Grid too coarse for the eps^{2/3} boundary layer."""


class IterationError(RuntimeError):
    pass


class PotentialKind(str, Enum):
    P_MINUS = "p_minus"
    Q_PLUS = "q_plus"
    ABS_X = "abs_x"
    P0_INTERIOR = "p0_interior"


@dataclass(frozen=True)
class PotentialSpec:
    kind: PotentialKind
    eps: float

    def __post_init__(self):
        object.__setattr__(self, "kind", PotentialKind(self.kind))
        if not self.eps > 0:
            raise DomainError(f"eps must be positive, got {self.eps}")

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        e2 = self.eps ** 2
        inside = np.abs(x) < 1.0
        if self.kind is PotentialKind.P_MINUS:
            return np.where(inside, 0.0, (x ** 2 - 1.0) / e2)
        if self.kind is PotentialKind.Q_PLUS:
            return np.where(inside, 2.0 * (1.0 - x ** 2), x ** 2 - 1.0) / e2
        if self.kind is PotentialKind.ABS_X:
            return np.abs(x) / e2
        # hard wall outside (-1, 1), free inside; only the interior part is representable
        return np.where(inside, 0.0, np.inf)


def required_points(eps: float, L: float = DEFAULT_L) -> int:
    """Smallest odd m >= 100 with h = 2L/(m+1) <= eps^{2/3}/10."""
    h_max = eps ** (2.0 / 3.0) / POINTS_PER_LAYER
    m = max(MIN_POINTS, math.ceil(2.0 * L / h_max) - 1)
    return m if m % 2 else m + 1


@dataclass(frozen=True)
class DiscreteOperator:
    matrix: TridiagonalMatrix
    x: np.ndarray
    eps: float
    spec: PotentialSpec

    @property
    def h(self) -> float:
        return float(self.x[1] - self.x[0])

    @property
    def m(self) -> int:
        return len(self.x)

    def solve(self, b) -> np.ndarray:
        return self.matrix.solve(b)


def operator_grid(L: float, m: int) -> np.ndarray:
    h = 2.0 * L / (m + 1)
    return -L + h * np.arange(1, m + 1)


def build_operator(spec: PotentialSpec, L: float = DEFAULT_L, m: int | None = None,
                   check_resolution: bool = True) -> DiscreteOperator:
    if L < 1.5:
        raise DomainError(f"truncation length must be >= 1.5, got {L}")
    if m is None:
        m = required_points(spec.eps, L)
    if m < MIN_POINTS:
        raise DomainError(f"operator grid needs m >= {MIN_POINTS}, got {m}")
    if spec.kind is PotentialKind.P0_INTERIOR:
        raise DomainError("p0_interior is the eps = 0 hard-wall limit; use apply_a0")
    x = operator_grid(L, m)
    h = x[1] - x[0]
    if check_resolution and h > spec.eps ** (2.0 / 3.0) / POINTS_PER_LAYER * (1 + 1e-12):
        raise ResolutionError(
            f"h = {h:.3e} does not resolve the eps^(2/3) = {spec.eps ** (2 / 3):.3e} layer; "
            f"need m >= {required_points(spec.eps, L)}")
    off = np.full(m - 1, -1.0 / h ** 2)
    diag = 2.0 / h ** 2 + spec(x)
    return DiscreteOperator(TridiagonalMatrix(off, diag, off.copy()), x, spec.eps, spec)


def smallest_eigenvalues(op: DiscreteOperator, k: int = 1) -> np.ndarray:
    """k smallest eigenvalues by Sturm-sequence bisection on the tridiagonal matrix."""
    if not 1 <= k <= 10:
        raise DomainError(f"k must be in 1..10, got {k}")
    try:
        vals = eigh_tridiagonal(op.matrix.diag, op.matrix.sup, eigvals_only=True,
                                select="i", select_range=(0, k - 1), lapack_driver="stebz")
    except LinAlgError as exc:
        raise IterationError(f"bisection failed for {op.spec}: {exc}") from exc
    return np.sort(vals)


def _minus_plus(eps: float, L: float, m: int | None):
    l_minus = build_operator(PotentialSpec(PotentialKind.P_MINUS, eps), L, m)
    l_plus = build_operator(PotentialSpec(PotentialKind.Q_PLUS, eps), L, l_minus.m)
    return l_minus, l_plus


def _to_sparse(t: TridiagonalMatrix) -> sp.csr_matrix:
    return sp.diags([t.sub, t.diag, t.sup], [-1, 0, 1], format="csr")


def generalized_gamma_spectrum(eps: float, L: float = DEFAULT_L, m: int | None = None,
                               k: int = 4, vectors: bool = False):
    """k smallest gamma of gamma w = eps^2 L+ L- w (brute-force oracle).

    With L+ = C C^T (banded Cholesky), the symmetric pentadiagonal matrix
    eps^2 C^T L- C is similar to eps^2 L+ L- (w = C y).
    """
    if not 1 <= k <= 6:
        raise DomainError(f"k must be in 1..6, got {k}")
    l_minus, l_plus = _minus_plus(eps, L, m)
    n = l_plus.m
    ab = np.zeros((2, n))
    ab[0] = l_plus.matrix.diag
    ab[1, :-1] = l_plus.matrix.sub
    try:
        c = cholesky_banded(ab, lower=True)
    except LinAlgError as exc:
        raise RuntimeError(f"Cholesky of L+ failed at eps={eps}, m={n}: {exc}") from exc
    C = sp.diags([c[0], c[1, :-1]], [0, -1], format="csr")
    M = (eps ** 2 * (C.T @ _to_sparse(l_minus.matrix) @ C)).todia()
    band = np.zeros((3, n))
    for d in range(3):
        band[d, : n - d] = M.diagonal(-d)
    if vectors:
        vals, vecs = eig_banded(band, lower=True, select="i", select_range=(0, k - 1))
        w = C @ vecs
        return vals, w, l_minus.x
    return eig_banded(band, lower=True, eigvals_only=True, select="i", select_range=(0, k - 1))


def thomas_fermi_profile(x):
    """(1 - x^2)^{1/2} inside (-1, 1), zero outside."""
    x = np.asarray(x, dtype=float)
    out = np.sqrt(np.clip(1.0 - x ** 2, 0.0, None))
    return out if out.ndim else float(out)


def apply_a_eps(u, eps: float, L: float = DEFAULT_L, m: int | None = None):
    """eps^{-2} L-^{-1} L+^{-1} u on the operator grid.

    ``u`` is either a callable (sampled on the grid) or an array of grid values.
    Returns (x, A_eps u).
    """
    l_minus, l_plus = _minus_plus(eps, L, m)
    x = l_minus.x
    vals = u(x) if callable(u) else np.asarray(u, dtype=float)
    if vals.shape != x.shape:
        raise DomainError(f"u has {vals.shape} samples, grid has {x.shape}")
    t = l_plus.solve(vals)
    return x, l_minus.solve(t) / eps ** 2


def apply_a0(u, quadrature_m: int = 4000, x=None):
    """Limiting operator A_0 applied to u.

    On [-1, 1], A_0 u is the Dirichlet solution of -f'' = u / (2(1 - s^2)),
    written with the Green's function as

        f(s) = (1 - s) int_{-1}^s u/(4(1-x)) dx + (1 + s) int_s^1 u/(4(1+x)) dx,

    which equals the iterated-integral form. The 1/(1 -+ x) singularities are
    subtracted analytically and the smooth remainders integrated with
    cumulative Simpson. A_0 u vanishes outside [-1, 1].

    ``u`` is a callable or samples on linspace(-1, 1, quadrature_m + 1).
    Returns the values on that grid, or at the points ``x`` if given.
    """
    if quadrature_m < 8:
        raise DomainError("quadrature_m must be >= 8")
    s = np.linspace(-1.0, 1.0, quadrature_m + 1)
    h = s[1] - s[0]
    vals = np.asarray(u(s) if callable(u) else u, dtype=float)
    if vals.shape != s.shape:
        raise DomainError(f"u has {vals.shape} samples, quadrature grid has {s.shape}")

    u_right, u_left = vals[-1], vals[0]
    d_right = (3.0 * vals[-1] - 4.0 * vals[-2] + vals[-3]) / (2.0 * h)
    d_left = (-3.0 * vals[0] + 4.0 * vals[1] - vals[2]) / (2.0 * h)
    with np.errstate(divide="ignore", invalid="ignore"):
        q_right = (vals - u_right) / (1.0 - s)
        q_left = (vals - u_left) / (1.0 + s)
    q_right[-1] = -d_right
    q_left[0] = d_left

    # F(s) = int_{-1}^s u/(1-x) dx,  G(s) = int_s^1 u/(1+x) dx
    F = cumulative_simpson(q_right, x=s, initial=0.0)
    Gc = cumulative_simpson(q_left, x=s, initial=0.0)
    G = Gc[-1] - Gc
    with np.errstate(divide="ignore"):
        if u_right != 0.0:
            F = F + u_right * (math.log(2.0) - np.log1p(-s))
        if u_left != 0.0:
            G = G + u_left * (math.log(2.0) - np.log1p(s))
    with np.errstate(invalid="ignore"):
        out = 0.25 * ((1.0 - s) * F + (1.0 + s) * G)
    out[0] = out[-1] = 0.0
    if x is None:
        return out
    x = np.asarray(x, dtype=float)
    return np.where(np.abs(x) < 1.0, np.interp(x, s, out), 0.0)


class NormKind(str, Enum):
    INV_MINUS = "inv_minus"
    INV_PLUS = "inv_plus"
    COMPOSED = "composed"


def _power_norm(apply_op: Callable[[np.ndarray], np.ndarray], apply_adj, n: int,
                tol: float = 1e-12, maxiter: int = 5000) -> float:
    rng = np.random.default_rng(12345)
    v = rng.standard_normal(n)
    v /= np.linalg.norm(v)
    sigma2 = 0.0
    for it in range(maxiter):
        w = apply_adj(apply_op(v))
        new = float(np.dot(v, w))
        nw = np.linalg.norm(w)
        if nw == 0.0:
            return 0.0
        v = w / nw
        if abs(new - sigma2) <= tol * abs(new):
            return math.sqrt(new)
        sigma2 = new
    raise IterationError(f"power iteration did not converge in {maxiter} steps (last {sigma2:.6e})")


def resolvent_norm(kind: NormKind | str, eps: float, L: float = DEFAULT_L,
                   m: int | None = None) -> float:
    """Operator 2-norm of L-^{-1}, L+^{-1} or L+^{-1} L-^{-1} on the discretization."""
    kind = NormKind(kind)
    l_minus, l_plus = _minus_plus(eps, L, m)
    if kind is NormKind.INV_MINUS:
        return 1.0 / smallest_eigenvalues(l_minus, 1)[0]
    if kind is NormKind.INV_PLUS:
        return 1.0 / smallest_eigenvalues(l_plus, 1)[0]
    # B = L+^{-1} L-^{-1}; B^T B = L-^{-1} L+^{-2} L-^{-1}
    return _power_norm(lambda v: l_plus.solve(l_minus.solve(v)),
                       lambda v: l_minus.solve(l_plus.solve(v)), l_minus.m)
