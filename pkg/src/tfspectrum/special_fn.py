"""Real-argument Airy functions, Gamma constants and Gegenbauer polynomials.

Airy evaluation is piecewise:

* ``-7 <= z <= 8.5``: Maclaurin series for Bi and Bi' (all terms positive for
  z > 0, so no cancellation) and, for ``z <= 2``, for Ai and Ai' as well.
* ``2 < z < 8.5``: Ai and Ai' are obtained by Taylor-stepping the Airy
  equation backwards from ``z = 8.5``. Ai grows in that direction, so the
  stepping is stable.
* ``z >= 8.5``: full asymptotic expansions, truncated at the smallest term
  (error below ``exp(-2*zeta)`` with ``zeta = 2/3 z^{3/2} >= 16.5``).
* ``z < -7``: oscillatory asymptotic expansions (the alternating Maclaurin
  series loses ~1e-11 to cancellation by z = -8, the expansion is 6e-13 at -7).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from numpy.polynomial import Polynomial

GAMMA_ONE_THIRD = 2.678938534707747633
GAMMA_TWO_THIRDS = 1.354117939426400417

_REFLECTION = 2.0 * math.pi / math.sqrt(3.0)
if abs(GAMMA_ONE_THIRD * GAMMA_TWO_THIRDS - _REFLECTION) > 1e-12 * _REFLECTION:
    raise RuntimeError("Gamma(1/3), Gamma(2/3) constants fail the reflection identity")

AI0 = 1.0 / (3.0 ** (2.0 / 3.0) * GAMMA_TWO_THIRDS)
AIP0 = -1.0 / (3.0 ** (1.0 / 3.0) * GAMMA_ONE_THIRD)
BI0 = 1.0 / (3.0 ** (1.0 / 6.0) * GAMMA_TWO_THIRDS)
BIP0 = 3.0 ** (1.0 / 6.0) / GAMMA_ONE_THIRD

Z_ASYMPTOTIC = 8.5
Z_NEGATIVE = -7.0
Z_AI_SERIES = 2.0
_STEP = 0.5


class DomainError(ValueError):
    """Argument outside the domain of a special function."""


@dataclass(frozen=True)
class AiryQuartet:
    ai: float
    bi: float
    ai_prime: float
    bi_prime: float

    @property
    def wronskian(self) -> float:
        return self.ai * self.bi_prime - self.ai_prime * self.bi


@dataclass(frozen=True)
class GammaConstants:
    gamma_one_third: float = GAMMA_ONE_THIRD
    gamma_two_thirds: float = GAMMA_TWO_THIRDS


def _maclaurin(z: float) -> tuple[float, float, float, float]:
    """Return f, f', g, g' for the two power series solutions.

    f = 1 + z^3/3! + 1*4 z^6/6! + ...,  g = z + 2 z^4/4! + 2*5 z^7/7! + ...
    """
    f, fp = 1.0, 0.0
    g, gp = z, 1.0
    tf, tg = 1.0, z
    z3 = z * z * z
    k = 0
    while True:
        k += 3
        tf *= z3 / ((k - 1) * k)
        tg *= z3 / (k * (k + 1))
        f += tf
        fp += k * tf / z if z != 0.0 else 0.0
        g += tg
        gp += (k + 1) * tg / z if z != 0.0 else 0.0
        scale = abs(f) + abs(g) + abs(fp) + abs(gp)
        if k > 6 and abs(tf) + abs(tg) + abs(k * tf) + abs(k * tg) < 1e-18 * scale * max(1.0, abs(z)):
            break
        if k > 600:
            break
    return f, fp, g, gp


def _airy_maclaurin(z: float) -> tuple[float, float, float, float]:
    f, fp, g, gp = _maclaurin(z)
    c1, c2 = AI0, -AIP0
    ai = c1 * f - c2 * g
    aip = c1 * fp - c2 * gp
    s3 = math.sqrt(3.0)
    bi = s3 * (c1 * f + c2 * g)
    bip = s3 * (c1 * fp + c2 * gp)
    return ai, aip, bi, bip


@lru_cache(maxsize=None)
def _uv_coefficients(count: int = 60) -> tuple[tuple[float, ...], tuple[float, ...]]:
    u = [1.0]
    for k in range(1, count):
        u.append(u[-1] * (6 * k - 5) * (6 * k - 3) * (6 * k - 1) / ((2 * k - 1) * 216.0 * k))
    v = [-(6 * k + 1) / (6 * k - 1) * uk for k, uk in enumerate(u)]
    return tuple(u), tuple(v)


def _asymptotic_sums(zeta: float, alternating: bool) -> tuple[float, float]:
    """Sum u_k/zeta^k and v_k/zeta^k, stopping at the smallest term."""
    u, v = _uv_coefficients()
    su = sv = 0.0
    last = math.inf
    p = 1.0
    for k in range(len(u)):
        sign = -1.0 if (alternating and k % 2) else 1.0
        tu = u[k] * p
        tv = v[k] * p
        mag = abs(tu) + abs(tv)
        if mag > last:
            break
        su += sign * tu
        sv += sign * tv
        last = mag
        if mag < 1e-17:
            break
        p /= zeta
    return su, sv


def _airy_asymptotic_positive(z: float, scaled: bool) -> tuple[float, float, float, float]:
    zeta = 2.0 / 3.0 * z ** 1.5
    z14 = z ** 0.25
    spi = math.sqrt(math.pi)
    sa, sa_p = _asymptotic_sums(zeta, alternating=True)
    sb, sb_p = _asymptotic_sums(zeta, alternating=False)
    decay = 1.0 if scaled else math.exp(-zeta)
    grow = 1.0 if scaled else (math.exp(zeta) if zeta < 709.0 else math.inf)
    ai = decay * sa / (2.0 * spi * z14)
    aip = -decay * z14 * sa_p / (2.0 * spi)
    bi = grow * sb / (spi * z14)
    bip = grow * z14 * sb_p / spi
    return ai, aip, bi, bip


def _airy_asymptotic_negative(z: float) -> tuple[float, float, float, float]:
    x = -z
    zeta = 2.0 / 3.0 * x ** 1.5
    u, v = _uv_coefficients()
    P = Q = R = S = 0.0
    last = math.inf
    p = 1.0
    for k in range(len(u)):
        mag = (abs(u[k]) + abs(v[k])) * p
        if mag > last:
            break
        sign = -1.0 if (k // 2) % 2 else 1.0
        if k % 2 == 0:
            P += sign * u[k] * p
            R += sign * v[k] * p
        else:
            Q += sign * u[k] * p
            S += sign * v[k] * p
        last = mag
        if mag < 1e-17:
            break
        p /= zeta
    theta = zeta + math.pi / 4.0
    s, c = math.sin(theta), math.cos(theta)
    x14 = x ** 0.25
    spi = math.sqrt(math.pi)
    ai = (s * P - c * Q) / (spi * x14)
    bi = (c * P + s * Q) / (spi * x14)
    aip = -x14 * (c * R + s * S) / spi
    bip = x14 * (s * R - c * S) / spi
    return ai, aip, bi, bip


def _taylor_step(a: float, y: float, yp: float, delta: float) -> tuple[float, float]:
    """Advance a solution of y'' = z y from z = a to z = a + delta."""
    # Taylor coefficients about a: c_{k+2} = (a c_k + c_{k-1}) / ((k+2)(k+1))
    c = [y, yp]
    val = y + yp * delta
    der = yp
    power = delta
    n = 1
    while n < 400:
        n += 1
        c.append((a * c[n - 2] + (c[n - 3] if n >= 3 else 0.0)) / (n * (n - 1)))
        dterm = n * c[n] * power
        power *= delta
        term = c[n] * power
        val += term
        der += dterm
        if n > 8 and abs(term) + abs(dterm) < 1e-18 * (abs(val) + abs(der)):
            break
    return val, der


def _ai_by_stepping(z: float) -> tuple[float, float]:
    ai, aip, _, _ = _airy_asymptotic_positive(Z_ASYMPTOTIC, scaled=False)
    a = Z_ASYMPTOTIC
    while a - z > 1e-15:
        delta = -min(_STEP, a - z)
        ai, aip = _taylor_step(a, ai, aip, delta)
        a += delta
    return ai, aip


def airy_eval(z: float, scaled: bool = False) -> AiryQuartet:
    """Ai, Bi, Ai', Bi' at a real argument.

    With ``scaled=True`` and ``z > 0`` the Ai pair is multiplied by
    ``exp(zeta)`` and the Bi pair by ``exp(-zeta)``, ``zeta = 2/3 z^{3/2}``,
    so that large arguments neither underflow nor overflow.
    """
    z = float(z)
    if not math.isfinite(z):
        raise DomainError(f"Airy functions need a finite argument, got {z!r}")
    if z >= Z_ASYMPTOTIC:
        ai, aip, bi, bip = _airy_asymptotic_positive(z, scaled)
        return AiryQuartet(ai, bi, aip, bip)
    if z < Z_NEGATIVE:
        ai, aip, bi, bip = _airy_asymptotic_negative(z)
        return AiryQuartet(ai, bi, aip, bip)
    ai, aip, bi, bip = _airy_maclaurin(z)
    if z > Z_AI_SERIES:
        ai, aip = _ai_by_stepping(z)
    if scaled and z > 0.0:
        zeta = 2.0 / 3.0 * z ** 1.5
        e = math.exp(zeta)
        ai, aip, bi, bip = ai * e, aip * e, bi / e, bip / e
    return AiryQuartet(ai, bi, aip, bip)


def airy_log_derivative(z: float) -> float:
    """Ai'(z)/Ai(z), finite for large positive z where Ai underflows."""
    q = airy_eval(z, scaled=True)
    return q.ai_prime / q.ai


def airy_ai_prime_first_zero(tol: float = 1e-14) -> float:
    """First zero of Ai' on the negative axis, located by bisection on [-2, 0]."""
    lo, hi = -2.0, 0.0
    f_lo = airy_eval(lo).ai_prime
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        f_mid = airy_eval(mid).ai_prime
        if f_mid == 0.0:
            return mid
        if (f_mid > 0) == (f_lo > 0):
            lo, f_lo = mid, f_mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def gegenbauer(n: int, lam: float, x):
    """C_n^lam(x) from the three-term recurrence; x may be an array."""
    if n < 0:
        raise DomainError(f"Gegenbauer degree must be non-negative, got {n}")
    x = np.asarray(x, dtype=float)
    prev = np.ones_like(x)
    if n == 0:
        return prev if prev.ndim else float(prev)
    cur = 2.0 * lam * x
    for m in range(1, n):
        prev, cur = cur, (2.0 * (m + lam) * x * cur - (m + 2.0 * lam - 1.0) * prev) / (m + 1)
    return cur if cur.ndim else float(cur)


def gegenbauer_poly(n: int, lam: float) -> Polynomial:
    """C_n^lam as a power-basis polynomial, built by the same recurrence."""
    if n < 0:
        raise DomainError(f"Gegenbauer degree must be non-negative, got {n}")
    prev = Polynomial([1.0])
    if n == 0:
        return prev
    x = Polynomial([0.0, 1.0])
    cur = 2.0 * lam * x
    for m in range(1, n):
        prev, cur = cur, (2.0 * (m + lam) * x * cur - (m + 2.0 * lam - 1.0) * prev) / (m + 1)
    return cur


def gamma_n(n: int) -> float:
    """Limiting eigenvalue 2 n (n + 1)."""
    if n < 1:
        raise DomainError(f"mode index must be >= 1, got {n}")
    return 2.0 * n * (n + 1)
