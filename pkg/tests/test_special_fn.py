import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import special

from tfspectrum.special_fn import (
    AI0, AIP0, BI0, GAMMA_ONE_THIRD, GAMMA_TWO_THIRDS, Z_AI_SERIES, Z_ASYMPTOTIC, Z_NEGATIVE,
    AiryQuartet, DomainError, GammaConstants, airy_ai_prime_first_zero, airy_eval,
    airy_log_derivative, gamma_n, gegenbauer, gegenbauer_poly,
)

# 30-digit reference values (mpmath airyai/airybi), frozen
MP_TABLE = [
    (-5.0, 0.350761009024114319788, 0.327192818554443136795, -0.138369134901600576850, 0.778411773001899246094),
    (-1.0, 0.535560883292352118800, -0.0101605671166452093950, 0.103997389496944611889, 0.592375626422792350817),
    (0.5, 0.231693606480833489769, -0.224910532664683893136, 0.854277043103155493300, 0.544572564140592301827),
    (3.0, 0.00659113935746071914426, -0.0119129767059513184738, 14.0373289637302320317, 22.9222149663821701851),
    (7.0, 7.4921288639971670807710e-07, -2.00815089473879199117e-06, 80327.7907094302470054, 209552.670873971319506),
    (15.0, 2.16496252073799229899e-18, -8.42056795401777276612e-18, 1.89820995674935896848e16, 7.31974920341041049619e16),
    (25.0, 8.11602682469138668376e-38, -4.06608933724328100532e-37, 3.92203077804138177380e35, 1.95707350832333089701e36),
]


def test_gamma_constants_reflection():
    g = GammaConstants()
    assert g.gamma_one_third * g.gamma_two_thirds == pytest.approx(2 * math.pi / math.sqrt(3), rel=1e-12)
    assert GAMMA_ONE_THIRD == pytest.approx(special.gamma(1 / 3), rel=1e-15)
    assert GAMMA_TWO_THIRDS == pytest.approx(special.gamma(2 / 3), rel=1e-15)


def test_values_at_zero():
    q = airy_eval(0.0)
    assert q.ai == pytest.approx(0.3550280539, abs=1e-10)
    assert q.ai_prime == pytest.approx(-0.2588194038, abs=1e-10)
    assert q.bi == pytest.approx(0.6149266274, abs=1e-10)
    assert (q.ai, q.ai_prime, q.bi) == (AI0, AIP0, BI0)


@pytest.mark.parametrize("z, ai, aip, bi, bip", MP_TABLE)
def test_against_high_precision_table(z, ai, aip, bi, bip):
    q = airy_eval(z)
    for got, want in [(q.ai, ai), (q.ai_prime, aip), (q.bi, bi), (q.bi_prime, bip)]:
        assert got == pytest.approx(want, rel=1e-10)


def test_against_scipy_on_dense_grid():
    z = np.linspace(-5.0, 30.0, 1401)
    ref = special.airy(z)
    got = np.array([[getattr(airy_eval(v), k) for k in ("ai", "ai_prime", "bi", "bi_prime")] for v in z]).T
    for g, r in zip(got, (ref[0], ref[1], ref[2], ref[3])):
        # oscillatory side: relative to the local envelope, not the value
        scale = np.maximum(np.abs(r), np.where(z < 0, 1.0, 0.0) * (1 + np.abs(z)) ** 0.25 / math.sqrt(math.pi))
        assert np.max(np.abs(g - r) / scale) < 1e-10


def test_ai_at_ten_matches_leading_asymptotics():
    exact = 1.1047532552898685934e-10
    leading = math.exp(-2 / 3 * 10 ** 1.5) / (2 * math.sqrt(math.pi) * 10 ** 0.25)
    assert airy_eval(10.0).ai == pytest.approx(exact, rel=1e-12)
    assert abs(leading / exact - 1) < 0.02


@pytest.mark.parametrize("z0", [Z_NEGATIVE, Z_AI_SERIES, Z_ASYMPTOTIC])
def test_continuity_across_switchovers(z0):
    lo, hi = airy_eval(z0 - 1e-12), airy_eval(z0 + 1e-12)
    for k in ("ai", "ai_prime", "bi", "bi_prime"):
        a, b = getattr(lo, k), getattr(hi, k)
        assert abs(a - b) <= 1e-10 * max(abs(a), abs(b))


@settings(max_examples=200, deadline=None)
@given(st.floats(min_value=-2.0, max_value=20.0))
def test_wronskian(z):
    assert abs(airy_eval(z).wronskian - 1 / math.pi) <= 1e-10


@settings(max_examples=50, deadline=None)
@given(st.floats(min_value=-5.0, max_value=6.0))
def test_ode_residual(z):
    h = 1e-3
    for k in ("ai", "bi"):
        f = [getattr(airy_eval(z + d), k) for d in (-h, 0.0, h)]
        second = (f[0] - 2 * f[1] + f[2]) / h ** 2
        # O(h^2) differencing error is set by the local size of f and f', not f alone
        slope = getattr(airy_eval(z), k + "_prime")
        scale = max(abs(f[1]), abs(slope), 1e-3) * (1 + z * z)
        assert abs(second - z * f[1]) <= 1e-5 * scale


def test_scaled_evaluation():
    z = 40.0
    zeta = 2 / 3 * z ** 1.5
    q, s = special.airye(z), airy_eval(z, scaled=True)
    assert s.ai == pytest.approx(q[0], rel=1e-12)
    assert s.bi == pytest.approx(q[2], rel=1e-12)
    assert s.ai * math.exp(-zeta) == pytest.approx(special.airy(z)[0], rel=1e-10)


def test_large_argument_range():
    for z in (50.0, 120.0, 200.0):
        ref = special.airye(z)
        s = airy_eval(z, scaled=True)
        assert s.ai == pytest.approx(ref[0], rel=1e-12)
        assert s.ai_prime == pytest.approx(ref[1], rel=1e-12)


@pytest.mark.parametrize("bad", [math.nan, math.inf, -math.inf])
def test_non_finite_rejected(bad):
    with pytest.raises(DomainError):
        airy_eval(bad)


def test_log_derivative():
    for z in (-0.5, 0.0, 1.0, 12.0):
        q = airy_eval(z)
        assert airy_log_derivative(z) == pytest.approx(q.ai_prime / q.ai, rel=1e-13)


def test_first_zero_of_ai_prime():
    a1 = airy_ai_prime_first_zero()
    assert a1 == pytest.approx(-1.0187929716474710890, abs=1e-12)
    assert abs(airy_eval(a1).ai_prime) < 1e-10
    assert airy_eval(a1 - 0.1).ai_prime * airy_eval(a1 + 0.1).ai_prime < 0


def test_quartet_is_immutable():
    q = AiryQuartet(1.0, 2.0, 3.0, 4.0)
    with pytest.raises(AttributeError):
        q.ai = 0.0


def test_gegenbauer_examples():
    assert gegenbauer(1, -0.5, 0.3) == pytest.approx(-0.3)
    assert gegenbauer(2, -0.5, 0.0) == pytest.approx(0.5)
    assert gegenbauer(0, -0.5, 0.7) == 1.0
    for n in range(1, 9):
        assert gegenbauer(n + 1, -0.5, 1.0) == pytest.approx(0.0, abs=1e-13)
        assert gegenbauer(n + 1, -0.5, -1.0) == pytest.approx(0.0, abs=1e-13)


def test_gegenbauer_three_halves_matches_scipy():
    x = np.linspace(-1, 1, 41)
    for n in range(0, 10):
        assert np.allclose(gegenbauer(n, 1.5, x), special.eval_gegenbauer(n, 1.5, x), atol=1e-12, rtol=1e-12)


def test_gegenbauer_minus_half_via_legendre():
    # scipy leaves alpha = -1/2 undefined; C_n^{-1/2} = (P_{n-2} - P_n) / (2n - 1) for n >= 2
    x = np.linspace(-1, 1, 41)
    for n in range(2, 11):
        ref = (special.eval_legendre(n - 2, x) - special.eval_legendre(n, x)) / (2 * n - 1)
        assert np.allclose(gegenbauer(n, -0.5, x), ref, atol=1e-13)


def test_gegenbauer_negative_degree():
    with pytest.raises(DomainError):
        gegenbauer(-1, -0.5, 0.0)


def test_gegenbauer_ode_and_identity():
    x = np.linspace(-0.98, 0.98, 50)
    for n in range(1, 9):
        p = gegenbauer_poly(n + 1, -0.5)
        residual = -2 * (1 - x ** 2) * p.deriv(2)(x) - gamma_n(n) * p(x)
        assert np.max(np.abs(residual)) <= 1e-10
        rhs = (1 - x ** 2) * gegenbauer(n - 1, 1.5, x) / (n * (n + 1))
        assert np.max(np.abs(gegenbauer(n + 1, -0.5, x) - rhs)) <= 1e-10


@given(st.integers(min_value=0, max_value=9), st.floats(min_value=-1, max_value=1))
def test_poly_agrees_with_recurrence(n, x):
    assert gegenbauer_poly(n, 1.5)(x) == pytest.approx(gegenbauer(n, 1.5, x), abs=1e-10)


def test_gamma_n():
    assert [gamma_n(k) for k in (1, 2, 3)] == [4, 12, 24]
    with pytest.raises(DomainError):
        gamma_n(0)
