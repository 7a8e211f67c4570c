"""Matching of inner finite-difference solutions to exterior Airy solutions at x = 1.

An even solution is w = a1 w1 + a2 w2 on [0, 1] and
w = c+ psi_A^{+sqrt(gamma)} + c- psi_A^{-sqrt(gamma)} for x > 1. Continuity of
w, w'' fixes (c+, c-) in terms of (a1, a2); continuity of w' and the jump
[w'''] = 2 w(1) / eps^2 give a 2x2 homogeneous system M(gamma) (a1, a2) = 0.

The inner basis is normalized by its data at x = 1, so it blows up at the
discrete "inner resonances" gamma_r where the block system with
w(1) = w''(1) = 0 is singular. There det M has a pole, and after row
normalization the pole shows up as a sign change. Eigenvalues are therefore
located on ``regularized_determinant``, which multiplies by the sign of the
inner block determinant so that only genuine zeros change sign. The
resonances themselves are available through ``find_inner_resonance``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.optimize import brentq

from . import fd_inner
from .fd_inner import DEFAULT_N, InnerBasis, solve_inner_basis
from .special_fn import DomainError, gamma_n
from .wkb_outer import matching_coefficients, psi_a_leading

BRACKET_LIMIT = 1.0
GROWTH = 4.0
XTOL_REL = 1e-14


class EigenvalueNotFound(RuntimeError):
    def __init__(self, message: str, scan: list[tuple[float, float, float]]):
        super().__init__(message)
        self.scan = scan


@dataclass(frozen=True)
class MatchSystem:
    m11: float
    m12: float
    m21: float
    m22: float
    gamma: float
    eps: float

    def matrix(self) -> np.ndarray:
        return np.array([[self.m11, self.m12], [self.m21, self.m22]])

    def det(self) -> float:
        return self.m11 * self.m22 - self.m12 * self.m21

    def row_norms(self) -> tuple[float, float]:
        return math.hypot(self.m11, self.m12), math.hypot(self.m21, self.m22)

    def normalized_det(self) -> float:
        r1, r2 = self.row_norms()
        return self.det() / (r1 * r2)

    def null_ratio(self) -> float:
        """a1/a2 from the row whose a1-coefficient is relatively largest."""
        r1, r2 = self.row_norms()
        if abs(self.m11) / r1 >= abs(self.m21) / r2:
            return -self.m12 / self.m11
        return -self.m22 / self.m21


def assemble_match_system(gamma: float, eps: float, basis: InnerBasis,
                          u_p: float, u_m: float) -> MatchSystem:
    if gamma <= 0.0:
        raise DomainError(f"gamma must be positive, got {gamma}")
    e23 = eps ** (2.0 / 3.0)
    e53 = eps ** (5.0 / 3.0)
    rg = math.sqrt(gamma)
    w1p, w1ppp = basis.d1
    w2p, w2ppp = basis.d2
    return MatchSystem(
        m11=u_p - e23 * w1p,
        m12=eps / rg * u_m - e23 * w2p,
        m21=rg * u_m - e53 * w1ppp,
        m22=eps * u_p - e53 * w2ppp,
        gamma=float(gamma),
        eps=float(eps),
    )


def match_system(gamma: float, eps: float, n: int = DEFAULT_N) -> tuple[MatchSystem, InnerBasis]:
    basis = solve_inner_basis(eps, gamma, n, rcond_floor=0.0)
    u_p, u_m = matching_coefficients(gamma, eps)
    return assemble_match_system(gamma, eps, basis, u_p, u_m), basis


def determinant(gamma: float, eps: float, n: int = DEFAULT_N) -> float:
    """Row-normalized matching determinant (changes sign at zeros and at inner resonances)."""
    return match_system(gamma, eps, n)[0].normalized_det()


def inner_block_sign(gamma: float, eps: float, n: int = DEFAULT_N) -> float:
    """Sign of det of the coupled inner block system; flips at each inner resonance."""
    return fd_inner.block_determinant_sign(eps, gamma, n)


def regularized_determinant(gamma: float, eps: float, n: int = DEFAULT_N) -> float:
    """Normalized determinant times the inner block sign: sign changes only at eigenvalues."""
    return determinant(gamma, eps, n) * inner_block_sign(gamma, eps, n)


@dataclass(frozen=True)
class MatchResult:
    gamma: float
    det_residual: float
    a_ratio: float
    c_plus: float
    c_minus: float
    n_target: int
    eps: float
    n_grid: int

    @property
    def target(self) -> float:
        return gamma_n(self.n_target)

    @property
    def deviation(self) -> float:
        return abs(self.gamma - self.target)


def _check_target(n_target: int) -> float:
    if n_target < 1 or n_target % 2 == 0:
        raise DomainError(f"even-mode matching needs an odd target index, got {n_target}")
    return gamma_n(n_target)


def _bracket(func, center: float, eps: float):
    half = max(100.0 * eps ** 2, 1e-9)
    scan = []
    while True:
        half = min(half, BRACKET_LIMIT)
        lo, hi = center - half, center + half
        f_lo, f_c, f_hi = func(lo), func(center), func(hi)
        scan += [(lo, f_lo, half), (center, f_c, half), (hi, f_hi, half)]
        if f_c == 0.0:
            return center, center, scan
        # prefer the side closer to the centre when both straddle
        if np.sign(f_lo) != np.sign(f_c):
            return lo, center, scan
        if np.sign(f_hi) != np.sign(f_c):
            return center, hi, scan
        if half >= BRACKET_LIMIT:
            raise EigenvalueNotFound(
                f"no sign change within |gamma - {center}| <= {BRACKET_LIMIT} at eps={eps}", scan)
        half *= GROWTH


def _refine(func, lo: float, hi: float, center: float) -> float:
    if lo == hi:
        return lo
    return brentq(func, lo, hi, xtol=XTOL_REL * abs(center), rtol=4.0 * np.finfo(float).eps,
                  maxiter=200)


def _result(gamma: float, eps: float, n_target: int, n_grid: int) -> MatchResult:
    system, _ = match_system(gamma, eps, n_grid)
    a_ratio = system.null_ratio()
    cp, cm = scattering_coefficients(a_ratio, 1.0, gamma, eps)
    return MatchResult(
        gamma=float(gamma),
        det_residual=abs(system.normalized_det()),
        a_ratio=float(a_ratio),
        c_plus=cp,
        c_minus=cm,
        n_target=n_target,
        eps=float(eps),
        n_grid=n_grid,
    )


def find_eigenvalue(eps: float, n_target: int = 1, n_grid: int = DEFAULT_N) -> MatchResult:
    """Eigenvalue gamma_{n,eps} near 2n(n+1) for an even mode (n odd).

    The bracket starts at half-width max(100 eps^2, 1e-9) around the limit and
    grows by a factor 4 up to |gamma - gamma_n| <= 1; Brent refines it.
    """
    center = _check_target(n_target)
    func = lambda g: regularized_determinant(g, eps, n_grid)
    lo, hi, _ = _bracket(func, center, eps)
    root = _refine(func, lo, hi, center)
    return _result(root, eps, n_target, n_grid)


def find_inner_resonance(eps: float, n_target: int = 1, n_grid: int = DEFAULT_N) -> MatchResult:
    """Nearest sign change of the *unregularized* normalized determinant.

    This is the inner resonance (a pole of det M) rather than an eigenvalue;
    it lies O(eps^2) from 2n(n+1). Kept to reproduce and diagnose
    determinant-sign-change tracking.
    """
    center = _check_target(n_target)
    func = lambda g: determinant(g, eps, n_grid)
    lo, hi, _ = _bracket(func, center, eps)
    root = _refine(func, lo, hi, center)
    return _result(root, eps, n_target, n_grid)


def scattering_coefficients(a1: float, a2: float, gamma: float, eps: float) -> tuple[float, float]:
    """c+- = (a1 -+ eps gamma^{-1/2} a2) / (2 psi_A^{+-sqrt(gamma)}(1)).

    psi_A(1) is taken at leading order, a(0) Ai(-2^{-2/3} eps^{1/3} nu), the
    same approximation used for the log-derivatives.
    """
    from .special_fn import airy_eval
    from .wkb_outer import OUTER, matching_argument

    rg = math.sqrt(gamma)
    out = []
    for sign in (1.0, -1.0):
        psi1 = OUTER.amp(0.0) * airy_eval(matching_argument(sign * rg, eps)).ai
        out.append((a1 - sign * eps / rg * a2) / (2.0 * psi1))
    return out[0], out[1]


class Normalization(str, Enum):
    SUP_ONE = "sup_one"
    L2_ONE = "l2_one"


@dataclass(frozen=True)
class EigenfunctionProfile:
    xs: np.ndarray
    ws: np.ndarray
    gamma: float
    eps: float
    normalization: Normalization
    jump_third: float = math.nan
    w_at_one: float = math.nan
    inner_third: float = math.nan


def _exterior(nu: float, eps: float, x: np.ndarray) -> np.ndarray:
    """Decaying exterior solution normalized to the leading-order value a(0)Ai(t1) at x = 1.

    Between x = 1 and the turning point sqrt(1 + eps nu) the local linear-potential
    Airy form Ai((2/eps^2)^{1/3}(x - 1) + t1) is used; beyond it the WKB form.
    """
    from .special_fn import airy_eval
    from .wkb_outer import OUTER, matching_argument

    t1 = matching_argument(nu, eps)
    s = math.sqrt(1.0 + eps * nu)
    scale = (2.0 / eps ** 2) ** (1.0 / 3.0)
    out = np.empty_like(x)
    for i, xv in enumerate(x):
        if xv < max(s, 1.0) or (xv - 1.0) * scale < 4.0:
            out[i] = OUTER.amp(0.0) * airy_eval(scale * (xv - 1.0) + t1).ai
        else:
            out[i] = psi_a_leading(nu, eps, xv)
    return out


def _exterior_third_derivative(cp: float, cm: float, rg: float, eps: float) -> float:
    """Third derivative at x = 1+ of c+ psi+ + c- psi-, from a degree-6 fit on 7 nodes."""
    delta = 0.02 * eps ** (2.0 / 3.0)
    x = 1.0 + delta * np.arange(7)
    y = cp * _exterior(rg, eps, x) + cm * _exterior(-rg, eps, x)
    coef = np.polynomial.polynomial.polyfit(np.arange(7.0), y, 6)
    return 6.0 * coef[3] / delta ** 3


def assemble_eigenfunction(result: MatchResult, basis: InnerBasis | None = None,
                           x_max: float = 1.5, n_exterior: int = 400,
                           normalization: Normalization | str = Normalization.SUP_ONE
                           ) -> EigenfunctionProfile:
    """Even eigenfunction on [-x_max, x_max] from a located eigenvalue."""
    normalization = Normalization(normalization)
    gamma, eps = result.gamma, result.eps
    if basis is None:
        basis = solve_inner_basis(eps, gamma, result.n_grid, rcond_floor=0.0)
    a1, a2 = result.a_ratio, 1.0
    inner = a1 * basis.w1 + a2 * basis.w2
    cp, cm = scattering_coefficients(a1, a2, gamma, eps)
    rg = math.sqrt(gamma)
    x_out = np.linspace(1.0, x_max, n_exterior + 1)[1:]
    outer = cp * _exterior(rg, eps, x_out) + cm * _exterior(-rg, eps, x_out)

    x_half = np.concatenate([basis.x, x_out])
    w_half = np.concatenate([inner, outer])
    xs = np.concatenate([-x_half[:0:-1], x_half])
    ws = np.concatenate([w_half[:0:-1], w_half])

    # w'''(1+) by differentiating the exterior profile itself, w'''(1-) from the inner stencil
    inner_third = a1 * basis.d1[1] + a2 * basis.d2[1]
    jump = _exterior_third_derivative(cp, cm, rg, eps) - inner_third

    if normalization is Normalization.SUP_ONE:
        k = int(np.argmax(np.abs(ws)))
        scale = ws[k]
    else:
        scale = math.sqrt(np.trapezoid(ws ** 2, xs))
    return EigenfunctionProfile(xs, ws / scale, gamma, eps, normalization,
                                jump_third=jump / scale, w_at_one=a1 / scale,
                                inner_third=inner_third / scale)


def amplitude_ratio_curve(eps_list, n_target: int = 1, n_grid: int = DEFAULT_N):
    """[(eps, a1/a2)] at the located eigenvalue for each eps."""
    eps_list = list(eps_list)
    if any(e <= 0 for e in eps_list):
        raise DomainError("eps values must be positive")
    return [(e, find_eigenvalue(e, n_target, n_grid).a_ratio) for e in eps_list]
