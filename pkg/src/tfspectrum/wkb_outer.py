"""WKB phase/amplitude maps and leading-order Airy solutions near x = 1.

Two phase variants are used. ``inner`` integrates sqrt(2t(2-t)) (the
Thomas-Fermi side of the turning point), ``outer`` integrates sqrt(t(2+t))
(the exterior side). Both are evaluated from closed-form antiderivatives,
with a power series near x = 0 where the closed forms cancel.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.special import binom

from .special_fn import GAMMA_ONE_THIRD, GAMMA_TWO_THIRDS, DomainError, airy_eval

INNER_MAX = 1.5
_SERIES_CUTOFF = 0.05
_SERIES_TERMS = 16


class Variant(str, Enum):
    INNER = "inner"
    OUTER = "outer"


class SingularRatioError(ArithmeticError):
    """Ai vanishes (numerically) at the matching point."""


def _integrand(variant: Variant, t):
    if variant is Variant.INNER:
        return np.sqrt(2.0 * t * (2.0 - t))
    return np.sqrt(t * (2.0 + t))


def _series_scale(variant: Variant, x: float) -> float:
    """S(x) with integral_0^x integrand = x^{3/2} S(x), for small x."""
    if variant is Variant.INNER:
        pref, s = 2.0, -0.5
    else:
        pref, s = math.sqrt(2.0), 0.5
    total = 0.0
    for k in range(_SERIES_TERMS):
        total += binom(0.5, k) * s ** k * x ** k / (k + 1.5)
    return pref * total


def phase_integral(variant: Variant, x: float) -> float:
    """integral_0^x of the variant's integrand, closed form."""
    variant = Variant(variant)
    if x < _SERIES_CUTOFF:
        return x ** 1.5 * _series_scale(variant, x)
    if variant is Variant.INNER:
        u = x - 1.0
        return math.sqrt(2.0) / 2.0 * (u * math.sqrt(x * (2.0 - x)) + math.asin(u) + math.pi / 2.0)
    u = x + 1.0
    return 0.5 * (u * math.sqrt(x * (x + 2.0)) - math.acosh(u))


@dataclass(frozen=True)
class WkbPhase:
    variant: Variant

    def _check(self, x: float) -> None:
        if not math.isfinite(x) or x < 0.0:
            raise DomainError(f"{self.variant.value} phase needs x >= 0, got {x}")
        if self.variant is Variant.INNER and x >= INNER_MAX:
            raise DomainError(f"inner phase needs x < {INNER_MAX}, got {x}")

    def xi(self, x: float) -> float:
        self._check(x)
        if x < _SERIES_CUTOFF:
            return x * (1.5 * _series_scale(self.variant, x)) ** (2.0 / 3.0)
        return (1.5 * phase_integral(self.variant, x)) ** (2.0 / 3.0)

    def xi_prime(self, x: float) -> float:
        self._check(x)
        if x == 0.0:
            # xi ~ (3/2 * pref * 2/3)^{2/3} x
            return 2.0 ** (2.0 / 3.0) if self.variant is Variant.INNER else 2.0 ** (1.0 / 3.0)
        return float(_integrand(self.variant, x)) / math.sqrt(self.xi(x))

    def amp(self, x: float) -> float:
        return self.xi_prime(x) ** -0.5


INNER = WkbPhase(Variant.INNER)
OUTER = WkbPhase(Variant.OUTER)


def phase_eval(variant, x: float) -> tuple[float, float]:
    """(xi(x), a(x)) for the requested variant."""
    ph = INNER if Variant(variant) is Variant.INNER else OUTER
    return ph.xi(x), ph.amp(x)


def _check_eps(eps: float) -> None:
    if not (0.0 < eps <= 0.1):
        raise DomainError(f"eps must lie in (0, 0.1], got {eps}")


def psi_a_leading(nu: float, eps: float, x):
    """Leading-order decaying exterior solution of
    -psi'' + (x^2 - 1) psi / eps^2 = (nu / eps) psi.

    Evaluated as a(y) Ai((1 + eps nu)^{1/3} xi(y) / eps^{2/3}) with
    x = sqrt(1 + eps nu) (1 + y); valid for y >= 0.
    """
    _check_eps(eps)
    if abs(eps * nu) >= 0.5:
        raise DomainError(f"|eps*nu| must be < 1/2, got {eps * nu}")
    s = math.sqrt(1.0 + eps * nu)
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    out = np.empty_like(xs)
    for i, xv in enumerate(xs):
        y = xv / s - 1.0
        if y < 0.0:
            if y > -1e-14:
                y = 0.0
            else:
                raise DomainError(f"x = {xv} lies before the turning point {s}")
        arg = (1.0 + eps * nu) ** (1.0 / 3.0) * OUTER.xi(y) / eps ** (2.0 / 3.0)
        out[i] = OUTER.amp(y) * airy_eval(arg).ai
    return out if np.ndim(x) else float(out[0])


def matching_argument(nu: float, eps: float) -> float:
    """Airy argument of the leading-order exterior solution at x = 1.

    Near x = 1 the exterior equation is -psi'' + (2(x - 1) - eps nu) psi / eps^2 = 0,
    whose decaying solution is Ai((2/eps^2)^{1/3} (x - 1 - eps nu / 2)). At x = 1
    the argument is -2^{-2/3} eps^{1/3} nu: negative (oscillatory side) for nu > 0.
    """
    return -(eps ** (1.0 / 3.0)) * 2.0 ** (-2.0 / 3.0) * nu


def log_derivative_ratio(nu: float, eps: float) -> float:
    """psi_A'(1) / psi_A(1) at leading WKB order (relative error O(eps^{2/3}))."""
    _check_eps(eps)
    t = matching_argument(nu, eps)
    q = airy_eval(t, scaled=True)
    if abs(q.ai) < 1e-13:
        raise SingularRatioError(f"Ai({t}) = {q.ai} is numerically zero")
    return 2.0 ** (1.0 / 3.0) * (q.ai_prime / q.ai) / eps ** (2.0 / 3.0)


def limit_scaled_log_derivative() -> float:
    """eps -> 0 limit of eps^{2/3} psi_A'(1)/psi_A(1): -6^{1/3} Gamma(2/3)/Gamma(1/3)."""
    return -(6.0 ** (1.0 / 3.0)) * GAMMA_TWO_THIRDS / GAMMA_ONE_THIRD


def matching_coefficients(gamma: float, eps: float) -> tuple[float, float]:
    """(U_p, U_m) built from the exterior log-derivatives at nu = +-sqrt(gamma)."""
    if gamma <= 0.0:
        raise DomainError(f"gamma must be positive, got {gamma}")
    root = math.sqrt(gamma)
    e23 = eps ** (2.0 / 3.0)
    r_plus = log_derivative_ratio(root, eps)
    r_minus = log_derivative_ratio(-root, eps)
    u_p = e23 * (r_plus + r_minus) / 2.0
    u_m = e23 * (-r_plus + r_minus) / 2.0
    return u_p, u_m


__all__ = [
    "Variant",
    "WkbPhase",
    "INNER",
    "OUTER",
    "SingularRatioError",
    "phase_eval",
    "phase_integral",
    "psi_a_leading",
    "matching_argument",
    "log_derivative_ratio",
    "limit_scaled_log_derivative",
    "matching_coefficients",
]
