from __future__ import annotations

import math

import mpmath as mp
import numpy as np
import pytest
import scipy.special as sps
from hypothesis import given, settings
from hypothesis import strategies as st

from xicensus import specfun as sf
from xicensus.errors import (
    DomainError,
    NearZeroDivision,
    NonFiniteInput,
    Overflow,
    PoleAtNonPositiveInteger,
    PoleAtOne,
)

OPTS = sf.DEFAULT_OPTIONS
mp.mp.dps = 30


def mp_zeta(s: complex) -> complex:
    return complex(mp.zeta(mp.mpc(s.real, s.imag)))


def mp_xi(s: complex) -> complex:
    z = mp.mpc(s.real, s.imag)
    return complex(mp.pi ** (-z / 2) * (z / 2) * mp.gamma(z / 2) * (z - 1) * mp.zeta(z))


def zeta2_partial_sum_oracle(N: int = 100_000) -> float:
    # partial sum plus the Euler-Maclaurin tail of sum n^-2 beyond N
    n = np.arange(1, N + 1, dtype=float)
    return float(np.sum(1.0 / n[::-1] ** 2) + 1.0 / N - 0.5 / N**2 + 1.0 / (6 * N**3))


def weierstrass_gamma_half(K: int = 200_000) -> float:
    # 1/Gamma(s) = s e^{gamma s} prod (1 + s/k) e^{-s/k}, tail of log sum ~ -s^2/(2K)
    s = 0.5
    k = np.arange(1, K + 1, dtype=float)
    log_prod = np.sum(np.log1p(s / k) - s / k) - s * s / (2 * K)
    return float(1.0 / (s * math.exp(sf.EULER_GAMMA * s + log_prod)))


# ---------------------------------------------------------------- zeta


@pytest.mark.parametrize("s", [2.0, 0.5 + 14j, 3 - 7j, -1.5 + 2j, 0.2 + 45j, 0.5 + 60j, 2 + 300j, -1 + 120j])
def test_zeta_against_mpmath(s):
    val = complex(sf.zeta(s))
    ref = mp_zeta(complex(s))
    assert abs(val - ref) <= 1e-11 * max(1.0, abs(ref))


def test_zeta_special_values():
    assert sf.zeta(0.0) == pytest.approx(-0.5, abs=1e-13)
    assert complex(sf.zeta(2.0)).real == pytest.approx(math.pi**2 / 6, abs=1e-12)
    assert complex(sf.zeta(2.0)).real == pytest.approx(zeta2_partial_sum_oracle(), abs=1e-12)


def test_zeta_conjugate_symmetry():
    s0 = 0.7 + 5j
    assert complex(sf.zeta(np.conj(s0))) == pytest.approx(np.conj(complex(sf.zeta(s0))), abs=1e-11)


def test_zeta_paths_agree_on_overlap_band(rng):
    s = rng.uniform(-0.5, 2, 50) + 1j * rng.uniform(25, 50, 50)
    a = np.asarray(sf.zeta(s, path="series"))
    b = np.asarray(sf.zeta(s, path="em"))
    assert np.max(np.abs(a - b)) <= 2 * OPTS.target_abs_err


def test_zeta_errors():
    with pytest.raises(PoleAtOne):
        sf.zeta(1.0)
    with pytest.raises(PoleAtOne):
        sf.zeta(1.0 + 1e-13)
    with pytest.raises(NonFiniteInput):
        sf.zeta(complex(float("nan"), 0))


def test_zeta_with_error_reports_small_estimate():
    val, err = sf.zeta_with_error(0.5 + 20j)
    assert 0 <= float(err) <= OPTS.target_abs_err


def test_zeta_vectorized_matches_scalar(rng):
    s = rng.uniform(-1, 3, 20) + 1j * rng.uniform(-80, 80, 20)
    vec = np.asarray(sf.zeta(s))
    one = np.array([complex(sf.zeta(complex(v))) for v in s])
    assert np.array_equal(vec, one)


def test_zeta_integral_real():
    assert sf.zeta_integral_real(2.0) == pytest.approx(math.pi**2 / 6, abs=1e-13)
    assert sf.zeta_integral_real(0.5) == pytest.approx(-1.4603545088095868, abs=1e-12)
    assert abs(sf.zeta_integral_real(3.0) - complex(sf.zeta(3.0)).real) <= 2 * OPTS.target_abs_err
    with pytest.raises(PoleAtOne):
        sf.zeta_integral_real(1.0)
    with pytest.raises(DomainError):
        sf.zeta_integral_real(-0.5)


# ---------------------------------------------------------------- zeta'/zeta


def _fd_logderiv(s: complex, h: float = 1e-5) -> complex:
    zp, zm = complex(sf.zeta(s + h)), complex(sf.zeta(s - h))
    return (np.log(zp) - np.log(zm)) / (2 * h)


@pytest.mark.parametrize("s", [2.0, 3 + 4j, 0.3 + 20j, -0.5 + 8j, 1.5 + 70j])
def test_zeta_logderiv_finite_difference(s):
    assert abs(complex(sf.zeta_logderiv(s)) - _fd_logderiv(complex(s))) <= 1e-4


def test_zeta_logderiv_at_two():
    # the digits -0.5699609930944... follow from zeta'(2) = -0.9375482543158437
    val = complex(sf.zeta_logderiv(2.0)).real
    assert val == pytest.approx(-0.9375482543158437 / (math.pi**2 / 6), abs=1e-12)
    assert val == pytest.approx(float(mp.zeta(2, derivative=1) / mp.zeta(2)), abs=1e-12)


def _von_mangoldt(N: int) -> np.ndarray:
    lam = np.zeros(N + 1)
    sieve = np.ones(N + 1, dtype=bool)
    sieve[:2] = False
    for p in range(2, int(N**0.5) + 1):
        if sieve[p]:
            sieve[p * p::p] = False
    for p in np.nonzero(sieve)[0]:
        q = int(p)
        lp = math.log(q)
        while q <= N:
            lam[q] = lp
            q *= int(p)
    return lam


def test_zeta_logderiv_dirichlet_series():
    N = 1_000_000
    lam = _von_mangoldt(N)
    n = np.arange(N + 1, dtype=float)
    n[0] = 1.0
    oracle = -float(np.sum(lam[1:] / n[1:] ** 3))
    assert complex(sf.zeta_logderiv(3.0)).real == pytest.approx(oracle, abs=1e-6)


def test_zeta_logderiv_conjugate_and_guard():
    s0 = 0.8 + 11j
    assert complex(sf.zeta_logderiv(np.conj(s0))) == pytest.approx(np.conj(complex(sf.zeta_logderiv(s0))),
                                                                   abs=1e-10)
    with pytest.raises(NearZeroDivision):
        sf.zeta_logderiv(0.5 + 14.134725141734693j)


# ---------------------------------------------------------------- Gamma


def test_binet_values():
    assert complex(sf.binet_g(10.0)).real == pytest.approx(0.008330563433362871, abs=1e-14)
    s = 3.0 + 7.0j
    stirling = (s - 0.5) * np.log(s) - s + 0.5 * math.log(2 * math.pi)
    assert complex(sf.binet_g(s)) == pytest.approx(complex(sps.loggamma(s)) - stirling, abs=1e-13)
    s0 = 0.4 + 2j
    assert complex(sf.binet_g(np.conj(s0))) == pytest.approx(np.conj(complex(sf.binet_g(s0))), abs=1e-15)
    with pytest.raises(DomainError):
        sf.binet_g(0.1 + 1j)


@settings(max_examples=100, deadline=None)
@given(r=st.floats(1.0, 1e4), phi=st.floats(-1.0, 1.0))
def test_binet_bound_property(r, phi):
    s = r * np.exp(1j * phi * math.pi / 2)
    if s.real < 0.125:
        s = 0.125 + 1j * s.imag
    assert abs(complex(sf.binet_g(s))) <= 1 / (8 * abs(s))


@pytest.mark.parametrize("s", [0.3 + 0.2j, 2.5 - 4j, 7 + 30j, -3.5 + 0.5j, 0.01 + 100j, 12.0])
def test_log_gamma_against_scipy(s):
    assert complex(sf.log_gamma(s)) == pytest.approx(complex(sps.loggamma(s)), abs=1e-12)


def test_gamma_values():
    assert complex(sf.gamma(5.0)).real == pytest.approx(24.0, rel=1e-14)
    assert complex(sf.gamma(0.5)).real == pytest.approx(weierstrass_gamma_half(), rel=1e-9)
    assert complex(sf.gamma(0.5)).real == pytest.approx(math.sqrt(math.pi), rel=1e-14)
    s = 3 + 7j
    assert complex(sf.log_gamma(np.conj(s))) == pytest.approx(np.conj(complex(sf.log_gamma(s))), abs=1e-14)
    with pytest.raises(PoleAtNonPositiveInteger):
        sf.log_gamma(-2.0)
    with pytest.raises(PoleAtNonPositiveInteger):
        sf.log_gamma(1e-9)


@pytest.mark.parametrize("s", [0.5 + 0.1j, 3 + 4j, 0.25 + 50j, 10.0])
def test_digamma_against_scipy(s):
    assert complex(sf.digamma(s)) == pytest.approx(complex(sps.digamma(s)), abs=1e-12)


def test_im_loggamma_half_asym():
    for s, tol in [(0.5 + 50j, 0.04), (2 + 100j, 0.02)]:
        assert abs(sf.im_loggamma_half_asym(s) - complex(sf.log_gamma(s / 2)).imag) <= tol
    t = 40.0
    expected = (t / 2) * math.log(math.sqrt(0.25 + t * t / 4)) - t / 2
    assert sf.im_loggamma_half_asym(1 + 1j * t) == pytest.approx(expected, abs=1e-12)
    with pytest.raises(DomainError):
        sf.im_loggamma_half_asym(1 - 2j)


# ---------------------------------------------------------------- xi


def test_xi_special_values():
    assert complex(sf.xi(0.0)).real == pytest.approx(0.5, abs=1e-15)
    assert complex(sf.xi(1.0)).real == pytest.approx(0.5, abs=1e-15)
    assert complex(sf.xi(0.5)).real == pytest.approx(mp_xi(0.5).real, abs=OPTS.target_abs_err)
    assert abs(complex(sf.xi(0.5 + 14j)).imag) <= OPTS.target_abs_err


@pytest.mark.parametrize("s", [1 + 1e-7, 1 + 1e-7j, 1e-7, -1e-7j, 1 + 2e-6])
def test_xi_near_poles_is_continuous(s):
    assert complex(sf.xi(s)) == pytest.approx(mp_xi(complex(s)), abs=1e-12)


@pytest.mark.parametrize("s", [0.3 + 7j, 2 + 3j, -1 + 25j, 0.5 + 40j, 3 - 12j])
def test_xi_against_mpmath(s):
    ref = mp_xi(complex(s))
    assert abs(complex(sf.xi(s)) - ref) <= 1e-10 * abs(ref)


def test_xi_scaled_has_same_argument(rng):
    s = rng.uniform(-1, 2, 30) + 1j * rng.uniform(1, 80, 30)
    full = np.asarray(sf.xi(s))
    scaled = np.asarray(sf.xi_scaled(s))
    factor = np.exp(np.asarray(sf.xi_log_scale(s)))
    assert np.allclose(scaled * factor, full, rtol=1e-13, atol=0)


def test_critical_line_realness(rng):
    t = rng.uniform(0, 200, 200)
    assert np.max(np.abs(np.asarray(sf.xi(0.5 + 1j * t)).imag)) <= 10 * OPTS.target_abs_err


@settings(max_examples=60, deadline=None)
@given(sigma=st.floats(-2, 3), t=st.floats(-60, 60).filter(lambda v: abs(v) > 1e-3))
def test_xi_functional_equation_direct(sigma, t):
    s = complex(sigma, t)
    a = complex(sf.xi(s, reflect=False))
    b = complex(sf.xi(1 - s, reflect=False))
    assert abs(a - b) <= 1e-9 * abs(a)


@settings(max_examples=60, deadline=None)
@given(sigma=st.floats(-2, 3), t=st.floats(0.01, 100))
def test_reflection_principle(sigma, t):
    s = complex(sigma, t)
    for f in (sf.zeta, sf.xi):
        try:
            v = complex(f(s))
        except PoleAtOne:
            continue
        assert complex(f(s.conjugate())) == pytest.approx(v.conjugate(), abs=10 * OPTS.target_abs_err, rel=1e-12)


def test_xi_logderiv():
    assert abs(complex(sf.xi_logderiv(0.5))) <= 1e-8
    assert abs(complex(sf.xi_logderiv(2.0)).imag) <= 1e-14
    s, h = 3 + 20j, 1e-5
    fd = (np.log(complex(sf.xi(s + h))) - np.log(complex(sf.xi(s - h)))) / (2 * h)
    assert abs(complex(sf.xi_logderiv(s)) - fd) <= 1e-4
    assert complex(sf.xi_logderiv(1 - s)) == pytest.approx(-complex(sf.xi_logderiv(s)), abs=1e-12)


# ---------------------------------------------------------------- pseudo Gamma


def test_pseudo_gamma_params():
    p = sf.PseudoGammaParams(10.0)
    assert p.R == 9 * 10.0 / 5 + 0.5
    with pytest.raises(ValueError):
        sf.PseudoGammaParams(2.0)


def test_nabla_values():
    p = sf.PseudoGammaParams(10.0)
    assert sf.nabla(0.5, p) == 2.0
    t = np.linspace(0, 300, 2001)
    x = t * p.log_R / 8
    v = np.asarray(sf.nabla(0.5 + 1j * t, p))
    assert np.allclose(v.real, 2 * (np.cos(x) ** 4 + np.sin(x) ** 4), rtol=0, atol=1e-13)
    assert np.all(v.imag == 0)
    assert v.real.min() >= 1 - 4 * math.ulp(1.0) and v.real.max() <= 2 + 4 * math.ulp(2.0)


def test_nabla_defining_form(rng):
    p = sf.PseudoGammaParams(15.0)
    s = rng.uniform(-2, 3, 40) + 1j * rng.uniform(-20, 20, 40)
    a = np.exp((s - 0.5) / 8 * p.log_R)
    b = np.exp((0.5 - s) / 8 * p.log_R)
    direct = ((a + b) ** 4 + (a - b) ** 4) / 8
    assert np.allclose(np.asarray(sf.nabla(s, p)), direct, rtol=1e-12)


@settings(max_examples=100, deadline=None)
@given(sigma=st.floats(-5, 6), t=st.floats(-100, 100), Y=st.floats(2.5, 400))
def test_nabla_symmetries(sigma, t, Y):
    p = sf.PseudoGammaParams(Y)
    s = complex(sigma, t)
    v = complex(sf.nabla(s, p))
    # 1 - s is rounded, so agreement is to a few ulps
    assert complex(sf.nabla(1 - s, p)) == pytest.approx(v, rel=1e-12)
    assert complex(sf.nabla(s.conjugate(), p)) == v.conjugate()


@given(x=st.floats(-10, 10))
def test_fourth_power_identity(x):
    lhs = math.cos(x) ** 4 + math.sin(x) ** 4
    assert lhs == pytest.approx(2 * (math.cos(x) ** 2 - 0.5) ** 2 + 0.5, abs=1e-15)


def test_nabla_overflow():
    with pytest.raises(Overflow):
        sf.nabla(2000.0, sf.PseudoGammaParams(10.0))


def test_log_nabla_matches():
    p = sf.PseudoGammaParams(30.0)
    s = np.array([0.5, 3 + 4j, -7 + 1j, 20 - 3j])
    assert np.allclose(np.exp(np.asarray(sf.log_nabla(s, p))), np.asarray(sf.nabla(s, p)), rtol=1e-13)


def test_ratios():
    p = sf.PseudoGammaParams(10.0)
    assert complex(sf.ratio_B(0.5, p)).real == pytest.approx(0.4971207781883141 / 2, abs=OPTS.target_abs_err)
    for s in (0.3 + 2j, 4 - 1j):
        assert complex(sf.ratio_Cprime(s, 0.0, p)) == 1.0
        assert complex(sf.ratio_C(s, 0.75, p)) == pytest.approx(
            complex(sf.nabla(1.25 + s, p)) / complex(sf.nabla(s, p)), rel=1e-14)
    with pytest.raises(DomainError):
        sf.ratio_Cprime(1.0, 2.5, p)


def test_ratio_B_guards_nabla_zeros():
    p = sf.PseudoGammaParams(10.0)
    # nabla vanishes where cosh z = -3
    z = math.acosh(3.0) + 1j * math.pi
    s0 = 0.5 + 2 * z / p.log_R
    assert abs(complex(sf.nabla(s0, p))) < 1e-12
    with pytest.raises(NearZeroDivision):
        sf.ratio_B(s0, p)


def test_d_symmetrized():
    p = sf.PseudoGammaParams(10.0)
    x = 0.75
    d = complex(sf.d_symmetrized(0.5, x, p))
    expected = 0.5 * (complex(sf.xi(x)) / complex(sf.nabla(x, p)) + complex(sf.xi(1 - x)) / complex(sf.nabla(1 - x, p)))
    assert d == pytest.approx(expected, rel=1e-14)
    assert d.real > 0 and d.imag == 0
    t = np.linspace(0.5, 30, 40)
    lhs = np.asarray(sf.d_symmetrized(0.5 + 1j * t, x, p)).real
    rhs = np.asarray(sf.ratio_B(x + 1j * t, p)).real
    assert np.allclose(lhs, rhs, rtol=1e-10, atol=1e-300)
    assert complex(sf.d_symmetrized(0.5, 2.0, p)).real > 0
    assert float(sf.log_abs_d_symmetrized(0.5, x, p)) == pytest.approx(math.log(abs(d)), abs=1e-13)


def test_eval_options_validation():
    with pytest.raises(ValueError):
        sf.EvalOptions(target_abs_err=0)
    with pytest.raises(ValueError):
        sf.EvalOptions(max_terms=8)
    with pytest.raises(ValueError):
        sf.EvalOptions(quadrature_points=4)
    with pytest.raises(ValueError):
        sf.EvalOptions(em_cutoff_t=-1)


def test_vectorize_wraps_scalar_callables():
    f = sf.vectorize(lambda z: z * z + 1)
    z = np.array([1j, 2.0, 1 + 1j])
    assert np.array_equal(f(z), z * z + 1)
