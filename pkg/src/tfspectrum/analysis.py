"""Epsilon sweeps, log-log power fits and the self-adjoint comparison problem."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Sequence

import numpy as np
from scipy.optimize import brentq

from . import matching, operators
from .fd_inner import DEFAULT_N
from .special_fn import DomainError, GAMMA_ONE_THIRD, GAMMA_TWO_THIRDS, gamma_n
from .wkb_outer import SingularRatioError, log_derivative_ratio

PRECISION_FLOOR = 1e-11
DEFAULT_EPS_RANGE = (1e-6, 1e-4)
DEFAULT_POINTS = 20


class FitError(ValueError):
    pass


class Tracking(str, Enum):
    EIGENVALUE = "eigenvalue"
    RESONANCE = "resonance"


@dataclass(frozen=True)
class SweepRow:
    eps: float
    gamma: float
    deviation: float
    a_ratio: float
    excluded: bool
    note: str = ""


@dataclass(frozen=True)
class SweepResult:
    target_gamma: float
    n_target: int
    n_grid: int
    rows: tuple[SweepRow, ...]
    tracking: Tracking = Tracking.EIGENVALUE

    def included(self) -> list[SweepRow]:
        return [r for r in self.rows if not r.excluded]


@dataclass(frozen=True)
class PowerFit:
    slope: float
    intercept: float
    r_squared: float
    n_points: int

    @property
    def prefactor(self) -> float:
        return math.exp(self.intercept)


def log_spaced(eps_min: float, eps_max: float, count: int) -> np.ndarray:
    """count log-equispaced values, descending."""
    if not 0 < eps_min <= eps_max:
        raise DomainError(f"need 0 < eps_min <= eps_max, got {eps_min}, {eps_max}")
    if count < 1:
        raise DomainError("count must be >= 1")
    if count == 1:
        return np.array([eps_max])
    grid = np.logspace(math.log10(eps_max), math.log10(eps_min), count)
    # snap to the nearest 15-digit decimal so nominal values like 1e-5 equal float("1e-5")
    return np.array([float(f"{v:.15g}") for v in grid])


def _sweep_row(eps: float, n_target: int, n_grid: int, tracking: Tracking) -> SweepRow:
    target = gamma_n(n_target)
    locate = matching.find_eigenvalue if tracking is Tracking.EIGENVALUE else matching.find_inner_resonance
    try:
        res = locate(eps, n_target, n_grid)
    except (matching.EigenvalueNotFound, ArithmeticError) as exc:
        return SweepRow(float(eps), math.nan, math.nan, math.nan, True, f"not found: {exc}")
    dev = abs(res.gamma - target)
    if dev < PRECISION_FLOOR:
        return SweepRow(float(eps), res.gamma, dev, res.a_ratio, True, "below precision floor")
    return SweepRow(float(eps), res.gamma, dev, res.a_ratio, False)


def sweep_eigenvalue(n_target: int = 1, eps_values: Sequence[float] | None = None,
                     n_grid: int = DEFAULT_N,
                     tracking: Tracking | str = Tracking.EIGENVALUE) -> SweepResult:
    """Locate gamma_{n,eps} for each eps; rows sorted by eps descending.

    ``tracking="resonance"`` follows the sign change of the unregularized
    determinant instead (the inner resonance), for diagnostics.
    """
    tracking = Tracking(tracking)
    if eps_values is None:
        eps_values = log_spaced(*DEFAULT_EPS_RANGE, DEFAULT_POINTS)
    eps_sorted = sorted((float(e) for e in eps_values), reverse=True)
    if any(e <= 0 for e in eps_sorted):
        raise DomainError("eps values must be positive")
    rows = tuple(_sweep_row(e, n_target, n_grid, tracking) for e in eps_sorted)
    return SweepResult(gamma_n(n_target), n_target, n_grid, rows, tracking)


def fit_power_law(x: Sequence[float], y: Sequence[float]) -> PowerFit:
    """Ordinary least squares of log|y| on log x."""
    x = np.asarray(x, dtype=float)
    y = np.abs(np.asarray(y, dtype=float))
    if x.shape != y.shape:
        raise FitError("x and y differ in length")
    if len(x) < 3:
        raise FitError(f"need at least 3 points for a fit, got {len(x)}")
    if np.any(x <= 0) or np.any(y <= 0):
        raise FitError("power fit needs positive abscissae and nonzero ordinates")
    lx, ly = np.log(x), np.log(y)
    A = np.column_stack([lx, np.ones_like(lx)])
    (slope, intercept), *_ = np.linalg.lstsq(A, ly, rcond=None)
    ss_res = float(np.sum((ly - A @ np.array([slope, intercept])) ** 2))
    ss_tot = float(np.sum((ly - ly.mean()) ** 2))
    r2 = 1.0 if ss_tot == 0.0 else min(1.0, max(0.0, 1.0 - ss_res / ss_tot))
    return PowerFit(float(slope), float(intercept), r2, len(x))


def power_fit(sweep: SweepResult, column: str = "deviation") -> PowerFit:
    """Fit |column| ~ C eps^p over the non-excluded rows."""
    rows = [r for r in sweep.included() if getattr(r, column) not in (0.0,) and
            math.isfinite(getattr(r, column))]
    return fit_power_law([r.eps for r in rows], [getattr(r, column) for r in rows])


def delta_constant() -> float:
    """pi Gamma(1/3) / (2 6^{1/3} Gamma(2/3)), the m = 1 limit of delta_ratio."""
    return math.pi * GAMMA_ONE_THIRD / (2.0 * 6.0 ** (1.0 / 3.0) * GAMMA_TWO_THIRDS)


def self_adjoint_eigenvalue(eps: float, m: int = 1) -> tuple[float, float]:
    """Even eigenvalue of -w'' + p_eps w = lambda w near (pi(2m-1)/2)^2 from the matching condition.

    Solves cos(k)/(k sin k) = -psi/psi'(1) with k = sqrt(lambda), the right side
    from the leading-order Airy log-derivative at nu = eps lambda. Returns
    (lambda, (pi(2m-1)/2 - k) / eps^{2/3}).
    """
    if not 0 < eps <= 1e-2:
        raise DomainError(f"eps must be in (0, 1e-2], got {eps}")
    if m < 1:
        raise DomainError(f"m must be >= 1, got {m}")
    k0 = math.pi * (2 * m - 1) / 2.0
    e23 = eps ** (2.0 / 3.0)

    def f(k: float) -> float:
        r = log_derivative_ratio(eps * k * k, eps)
        # cos k / (k sin k) + 1/r, multiplied through by sin k to stay finite
        return math.cos(k) / k + math.sin(k) / r

    lo, hi = k0 - 10.0 * e23 * m, k0
    try:
        f_lo, f_hi = f(lo), f(hi)
    except SingularRatioError as exc:
        raise matching.EigenvalueNotFound(str(exc), []) from exc
    if f_lo * f_hi > 0:
        raise matching.EigenvalueNotFound(
            f"no root for sqrt(lambda) in [{lo}, {hi}] at eps={eps}, m={m}",
            [(lo, f_lo, 0.0), (hi, f_hi, 0.0)])
    k = brentq(f, lo, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps)
    return k * k, (k0 - k) / e23


class ScalingKind(str, Enum):
    LAMBDA1_MINUS = "lambda1_minus"
    LAMBDA1_PLUS = "lambda1_plus"
    LAMBDA1_ABSX = "lambda1_absx"
    INV_MINUS = "inv_minus"
    INV_PLUS = "inv_plus"
    COMPOSED = "composed"


_POTENTIAL = {
    ScalingKind.LAMBDA1_MINUS: operators.PotentialKind.P_MINUS,
    ScalingKind.LAMBDA1_PLUS: operators.PotentialKind.Q_PLUS,
    ScalingKind.LAMBDA1_ABSX: operators.PotentialKind.ABS_X,
}


@dataclass(frozen=True)
class ScalingRow:
    eps: float
    value: float
    m: int
    scaled: float = math.nan


@dataclass(frozen=True)
class ScalingSweep:
    kind: ScalingKind
    rows: tuple[ScalingRow, ...]
    fit: PowerFit | None
    errors: tuple[str, ...] = field(default=())


def scaling_quantity(kind: ScalingKind | str, eps: float, L: float = operators.DEFAULT_L,
                     m: int | None = None) -> tuple[float, int]:
    kind = ScalingKind(kind)
    m = operators.required_points(eps, L) if m is None else m
    if kind in _POTENTIAL:
        op = operators.build_operator(operators.PotentialSpec(_POTENTIAL[kind], eps), L, m)
        return float(operators.smallest_eigenvalues(op, 1)[0]), m
    return operators.resolvent_norm(kind.value, eps, L, m), m


def scaling_sweep(kind: ScalingKind | str, eps_values: Sequence[float],
                  L: float = operators.DEFAULT_L, m: int | None = None) -> ScalingSweep:
    """Quantity vs eps with a log-log fit; lambda1 rows also carry lambda1 * eps^{4/3}."""
    kind = ScalingKind(kind)
    rows, errors = [], []
    for eps in sorted((float(e) for e in eps_values), reverse=True):
        try:
            value, used_m = scaling_quantity(kind, eps, L, m)
        except operators.ResolutionError as exc:
            errors.append(f"eps={eps:g}: {exc}")
            continue
        scaled = value * eps ** (4.0 / 3.0) if kind in _POTENTIAL else math.nan
        rows.append(ScalingRow(eps, value, used_m, scaled))
    fit = None
    if len(rows) >= 3:
        fit = fit_power_law([r.eps for r in rows], [r.value for r in rows])
    return ScalingSweep(kind, tuple(rows), fit, tuple(errors))
