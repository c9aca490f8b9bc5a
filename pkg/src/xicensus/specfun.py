"""Special functions: zeta, log-gamma via the Binet remainder, xi, and the
pseudo Gamma function with the ratios built from it.

Every public evaluator accepts a Python number or a numpy array of complex
values and returns the same kind.  Array evaluation is row-independent: the
value computed for one point never depends on which other points share the
call, so results are reproducible however callers batch or parallelize them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

import numpy as np

from .errors import (
    DomainError,
    NearZeroDivision,
    NonConvergence,
    NonFiniteInput,
    Overflow,
    PoleAtNonPositiveInteger,
    PoleAtOne,
)

EULER_GAMMA = 0.57721566490153286061
# first Stieltjes constant, (s-1)zeta(s) = 1 + g0 (s-1) - g1 (s-1)^2 + ...
STIELTJES_1 = -0.07281584548367672486
LOG_PI = math.log(math.pi)
LOG_2PI = math.log(2.0 * math.pi)
LOG2 = math.log(2.0)
MAX_HEIGHT = 1.0e4

_BERNOULLI = [Fraction(1, 6), Fraction(-1, 30), Fraction(1, 42), Fraction(-1, 30),
              Fraction(5, 66), Fraction(-691, 2730), Fraction(7, 6), Fraction(-3617, 510)]
# B_{2k}/(2k)!
_EM_COEF = [float(b / math.factorial(2 * k)) for k, b in enumerate(_BERNOULLI, start=1)]
# B_{2k}/(2k(2k-1)): Stirling series for the Binet remainder
_STIRLING_COEF = [float(b / (2 * k * (2 * k - 1))) for k, b in enumerate(_BERNOULLI, start=1)]
# coefficients of the large-|a| expansion of one unit interval of the Binet integral
_BINET_SERIES = np.array([(-1) ** k * (k - 1) / (2.0 * k * (k + 1)) for k in range(2, 30)])
_BINET_SERIES_SWITCH = 8.0


@dataclass(frozen=True)
class EvalOptions:
    """Accuracy and algorithm-selection knobs shared by the evaluators."""

    target_abs_err: float = 1e-12
    max_terms: int = 4000
    em_cutoff_t: float = 50.0
    quadrature_points: int = 24

    def __post_init__(self):
        if not self.target_abs_err > 0:
            raise ValueError("target_abs_err must be positive")
        if self.max_terms < 16:
            raise ValueError("max_terms must be at least 16")
        if not self.em_cutoff_t >= 0:
            raise ValueError("em_cutoff_t must be non-negative")
        if self.quadrature_points < 8:
            raise ValueError("quadrature_points must be at least 8")


DEFAULT_OPTIONS = EvalOptions()


@dataclass(frozen=True)
class PseudoGammaParams:
    """Height parameter Y of the pseudo Gamma function and its base R = 9Y/5 + 1/2."""

    Y: float
    R: float = field(init=False)

    def __post_init__(self):
        if not (math.isfinite(self.Y) and self.Y > 2):
            raise ValueError(f"Y must be a finite number > 2, got {self.Y!r}")
        object.__setattr__(self, "R", 9 * self.Y / 5 + 0.5)

    @property
    def log_R(self) -> float:
        return math.log(self.R)


# ---------------------------------------------------------------- helpers


def _as_array(s) -> tuple[np.ndarray, bool]:
    arr = np.asarray(s, dtype=np.complex128)
    if not np.all(np.isfinite(arr)):
        raise NonFiniteInput("complex argument must have finite components")
    return arr, arr.ndim == 0


def _out(values: np.ndarray, scalar: bool):
    if scalar:
        return complex(values.reshape(()))
    return values


def _real_out(values: np.ndarray, scalar: bool):
    if scalar:
        return float(values.reshape(()))
    return values


# ---------------------------------------------------------------- zeta


def _hasse_block(s: np.ndarray, opts: EvalOptions, deriv: bool):
    """Globally convergent alternating double series (Hasse/Knopp form).

    The inner binomial sums are produced by repeated halved differencing of
    (k+1)^(-s), which never forms the large binomial coefficients.
    """
    den = 1.0 - np.exp((1.0 - s) * LOG2)
    # tolerance on the eta-series terms that yields target_abs_err on zeta
    tol = 0.5 * opts.target_abs_err * np.abs(den)
    tmax = float(np.max(np.abs(s.imag))) if s.size else 0.0
    smax = float(np.max(np.abs(s))) if s.size else 0.0
    cap = min(opts.max_terms, int(1.5 * tmax + 0.5 * smax) + 100)
    while True:
        logk = np.log(np.arange(1, cap + 1, dtype=np.float64))
        a = np.exp(-np.outer(s, logk))
        da = -a * logk if deriv else None
        eta = np.zeros(s.shape, dtype=np.complex128)
        deta = np.zeros(s.shape, dtype=np.complex128)
        small = np.zeros(s.shape, dtype=np.int64)
        done = np.zeros(s.shape, dtype=bool)
        last = np.zeros(s.shape, dtype=np.float64)
        for n in range(cap - 1):
            live = ~done
            term = 0.5 * a[:, 0]
            eta[live] += term[live]
            mag = np.abs(term)
            if deriv:
                dterm = 0.5 * da[:, 0]
                deta[live] += dterm[live]
                mag = np.maximum(mag, np.abs(dterm))
            last[live] = mag[live]
            small = np.where(mag < tol, small + 1, 0)
            done |= small >= 3
            if done.all():
                break
            a = 0.5 * (a[:, :-1] - a[:, 1:])
            if deriv:
                da = 0.5 * (da[:, :-1] - da[:, 1:])
        if done.all():
            break
        if cap >= opts.max_terms:
            raise NonConvergence(
                f"alternating series did not reach {opts.target_abs_err:g} within {cap} terms")
        cap = min(opts.max_terms, 2 * cap)
    zeta = eta / den
    err = (3.0 * last + 1e-16 * cap) / np.abs(den)
    if not deriv:
        return zeta, None, err
    dden = np.exp((1.0 - s) * LOG2) * LOG2
    dzeta = (deta - zeta * dden) / den
    return zeta, dzeta, err


def em_terms(t: float) -> int:
    """Main-sum length of the Euler-Maclaurin evaluator at height t."""
    return max(20, int(math.ceil(2.0 * abs(t))))


def _em_block(s: np.ndarray, N: int, deriv: bool):
    """Euler-Maclaurin evaluation with a fixed main-sum length N for all rows."""
    logn = np.log(np.arange(1, N, dtype=np.float64))
    terms = np.exp(-np.outer(s, logn))
    total = terms.sum(axis=1)
    logN = math.log(N)
    NmS = np.exp(-s * logN)  # N^{-s}
    sm1 = s - 1.0
    total = total + N * NmS / sm1 + 0.5 * NmS
    if deriv:
        dtotal = -(terms * logn).sum(axis=1)
        dtotal = dtotal - logN * N * NmS / sm1 - N * NmS / sm1**2 - 0.5 * logN * NmS
    # corrections B_{2k}/(2k)! * s(s+1)...(s+2k-2) * N^{-s-2k+1}
    poly = s.copy()
    dpoly = np.ones_like(s)
    powN = NmS / N
    last = np.zeros(s.shape)
    for k, coef in enumerate(_EM_COEF, start=1):
        corr = coef * poly * powN
        total = total + corr
        if deriv:
            dtotal = dtotal + coef * (dpoly - logN * poly) * powN
        last = np.abs(corr)
        # advance poly by two factors (s+2k-1)(s+2k) and N power by N^{-2}
        for j in (2 * k - 1, 2 * k):
            dpoly = dpoly * (s + j) + poly
            poly = poly * (s + j)
        powN = powN / (N * N)
    err = last + 1e-16 * N
    return total, (dtotal if deriv else None), err


def _zeta_dispatch(s: np.ndarray, opts: EvalOptions, deriv: bool, path: str | None = None):
    flat = s.reshape(-1)
    if flat.size and np.max(np.abs(flat.imag)) > MAX_HEIGHT:
        raise DomainError(f"heights beyond {MAX_HEIGHT:g} are not supported")
    if np.any(np.abs(flat - 1.0) <= 10.0 * opts.target_abs_err):
        raise PoleAtOne("zeta has a pole at s = 1")
    val = np.empty_like(flat)
    dval = np.empty_like(flat)
    err = np.empty(flat.shape)
    if path is None:
        near_eta_pole = np.abs(1.0 - np.exp((1.0 - flat) * LOG2)) < 0.05
        use_hasse = (np.abs(flat.imag) <= opts.em_cutoff_t) & ~near_eta_pole
    elif path == "series":
        use_hasse = np.ones(flat.shape, dtype=bool)
    elif path == "em":
        use_hasse = np.zeros(flat.shape, dtype=bool)
    else:
        raise ValueError(f"unknown zeta path {path!r}")
    idx = np.nonzero(use_hasse)[0]
    for start in range(0, idx.size, 256):
        chunk = idx[start:start + 256]
        z, dz, e = _hasse_block(flat[chunk], opts, deriv)
        val[chunk], err[chunk] = z, e
        if deriv:
            dval[chunk] = dz
    idx = np.nonzero(~use_hasse)[0]
    if idx.size:
        sizes = np.array([em_terms(t) for t in flat[idx].imag])
        for N in np.unique(sizes):
            group = idx[sizes == N]
            rows = max(1, 2_000_000 // int(N))
            for start in range(0, group.size, rows):
                chunk = group[start:start + rows]
                z, dz, e = _em_block(flat[chunk], int(N), deriv)
                val[chunk], err[chunk] = z, e
                if deriv:
                    dval[chunk] = dz
    return val.reshape(s.shape), dval.reshape(s.shape), err.reshape(s.shape)


def zeta(s, opts: EvalOptions = DEFAULT_OPTIONS, *, path: str | None = None):
    """Riemann zeta function.

    Uses the alternating double series for |t| <= ``opts.em_cutoff_t`` and
    Euler-Maclaurin summation above it (or where 1 - 2^(1-s) nearly vanishes).
    ``path`` forces one evaluator: ``"series"`` or ``"em"``.
    """
    arr, scalar = _as_array(s)
    val, _, _ = _zeta_dispatch(arr, opts, False, path)
    return _out(val, scalar)


def zeta_with_error(s, opts: EvalOptions = DEFAULT_OPTIONS, *, path: str | None = None):
    """Return ``(zeta(s), estimated absolute error)``."""
    arr, scalar = _as_array(s)
    val, _, err = _zeta_dispatch(arr, opts, False, path)
    return _out(val, scalar), _real_out(err, scalar)


def zeta_logderiv(s, opts: EvalOptions = DEFAULT_OPTIONS, *, path: str | None = None):
    """zeta'(s)/zeta(s) from term-wise differentiation of the active series."""
    arr, scalar = _as_array(s)
    val, dval, _ = _zeta_dispatch(arr, opts, True, path)
    if np.any(np.abs(val) <= 10.0 * opts.target_abs_err):
        raise NearZeroDivision("zeta(s) is too close to zero for its log-derivative")
    return _out(dval / val, scalar)


def zeta_integral_real(sigma: float, opts: EvalOptions = DEFAULT_OPTIONS) -> float:
    """zeta(sigma) for real sigma > 0 from the fractional-part integral.

    The integral over each [n, n+1] is elementary and summed exactly; past
    n = N the remaining integral of {v} v^(-sigma-1) is expanded with periodic
    Bernoulli functions, truncated once its next term is below the target.
    """
    sigma = float(sigma)
    if not math.isfinite(sigma) or sigma <= 0:
        raise DomainError("zeta_integral_real needs a finite sigma > 0")
    if abs(sigma - 1.0) <= 10.0 * opts.target_abs_err:
        raise PoleAtOne("zeta has a pole at s = 1")
    N = 64
    n = np.arange(1, N, dtype=np.float64)
    # (n+1)^a - n^a computed as n^a * expm1(a * log1p(1/n))
    lp = np.log1p(1.0 / n)
    a1 = 1.0 - sigma
    if abs(a1) > 1e-300:
        first = n**a1 * np.expm1(a1 * lp) / a1
    else:  # pragma: no cover - sigma == 1 rejected above
        first = lp
    second = (n / sigma) * n**-sigma * np.expm1(-sigma * lp)
    pieces = first + second
    body = math.fsum(pieces.tolist())
    # tail: int_N^inf {v} v^(-sigma-1) dv
    tail = N**-sigma / (2.0 * sigma)
    # - sum_k B_2k/(2k)! h^{(2k-2)}(N) with h(v) = v^(-sigma-1)
    deriv_coef = 1.0  # (sigma+1)(sigma+2)...(sigma+m), m = 2k-2
    m = 0
    for coef in _EM_COEF:
        term = coef * deriv_coef * N ** (-sigma - 1 - m)
        tail -= term
        if abs(sigma * term) < 0.1 * opts.target_abs_err:
            break
        deriv_coef *= (sigma + m + 1) * (sigma + m + 2)
        m += 2
    else:
        raise NonConvergence("fractional-part tail expansion did not converge")
    return sigma / (sigma - 1.0) - sigma * (body + tail)


# ---------------------------------------------------------------- Binet / log-gamma


def _binet_interval(a: np.ndarray) -> np.ndarray:
    """Integral of p(v)/(v+s)^2 over one unit interval, with a = n + s."""
    out = np.empty_like(a)
    big = np.abs(a) >= _BINET_SERIES_SWITCH
    if np.any(big):
        z = 1.0 / a[big]
        acc = np.zeros_like(z)
        for c in _BINET_SERIES[::-1]:
            acc = (acc + c) * z
        out[big] = acc * z
    small = ~big
    if np.any(small):
        aa = a[small]
        out[small] = (aa + 0.5) * np.log1p(1.0 / aa) - 1.0
    return out


def _binet_interval_deriv(a: np.ndarray) -> np.ndarray:
    out = np.empty_like(a)
    big = np.abs(a) >= _BINET_SERIES_SWITCH
    if np.any(big):
        z = 1.0 / a[big]
        ks = np.arange(2, 2 + _BINET_SERIES.size)
        dcoef = -ks * _BINET_SERIES
        acc = np.zeros_like(z)
        for c in dcoef[::-1]:
            acc = (acc + c) * z
        out[big] = acc * z * z
    small = ~big
    if np.any(small):
        aa = a[small]
        out[small] = np.log1p(1.0 / aa) - (aa + 0.5) / (aa * (aa + 1.0))
    return out


def _binet_tail(w: np.ndarray, deriv: bool) -> np.ndarray:
    """Stirling series of g(w) for the remainder beyond the summed intervals."""
    inv = 1.0 / w
    inv2 = inv * inv
    acc = np.zeros_like(w)
    if deriv:
        for k in range(len(_BERNOULLI), 0, -1):
            acc = acc * inv2 - float(_BERNOULLI[k - 1]) / (2 * k)
        return acc * inv2
    for c in _STIRLING_COEF[::-1]:
        acc = acc * inv2 + c
    return acc * inv


def _binet_core(s: np.ndarray, opts: EvalOptions, deriv: bool = False) -> np.ndarray:
    N = opts.quadrature_points
    total = np.zeros_like(s)
    piece = _binet_interval_deriv if deriv else _binet_interval
    for n in range(N):
        total = total + piece(s + n)
    return total + _binet_tail(s + N, deriv)


def binet_g(s, opts: EvalOptions = DEFAULT_OPTIONS):
    """Binet remainder g(s) of Stirling's formula, for Re s >= 1/8."""
    arr, scalar = _as_array(s)
    if np.any(arr.real < 0.125):
        raise DomainError("binet_g requires Re(s) >= 1/8")
    return _out(_binet_core(arr.reshape(-1), opts).reshape(arr.shape), scalar)


def _check_gamma_poles(arr: np.ndarray):
    near = arr.real <= 0.5
    if np.any(near):
        k = np.round(arr.real[near])
        if np.any((k <= 0) & (np.abs(arr[near] - k) < 1e-8)):
            raise PoleAtNonPositiveInteger("Gamma has a pole at a non-positive integer")


def _shift_count(sigma: np.ndarray) -> np.ndarray:
    return np.where(sigma < 4.0, np.ceil(4.0 - sigma), 0.0).astype(np.int64)


def _log_gamma_core(s: np.ndarray, opts: EvalOptions) -> np.ndarray:
    shift = _shift_count(s.real)
    corr = np.zeros_like(s)
    for j in range(int(shift.max()) if shift.size else 0):
        m = shift > j
        corr[m] = corr[m] + np.log(s[m] + j)
    w = s + shift
    lg = (w - 0.5) * np.log(w) - w + 0.5 * LOG_2PI + _binet_core(w, opts)
    return lg - corr


def log_gamma(s, opts: EvalOptions = DEFAULT_OPTIONS):
    """Principal log Gamma(s), continuous off the negative real axis."""
    arr, scalar = _as_array(s)
    _check_gamma_poles(arr)
    return _out(_log_gamma_core(arr.reshape(-1), opts).reshape(arr.shape), scalar)


def gamma(s, opts: EvalOptions = DEFAULT_OPTIONS):
    """Gamma(s) = exp(log_gamma(s))."""
    arr, scalar = _as_array(s)
    _check_gamma_poles(arr)
    return _out(np.exp(_log_gamma_core(arr.reshape(-1), opts)).reshape(arr.shape), scalar)


def _digamma_core(s: np.ndarray, opts: EvalOptions) -> np.ndarray:
    shift = _shift_count(s.real)
    corr = np.zeros_like(s)
    for j in range(int(shift.max()) if shift.size else 0):
        m = shift > j
        corr[m] = corr[m] + 1.0 / (s[m] + j)
    w = s + shift
    return np.log(w) - 0.5 / w + _binet_core(w, opts, deriv=True) - corr


def digamma(s, opts: EvalOptions = DEFAULT_OPTIONS):
    """Gamma'(s)/Gamma(s) from the differentiated Stirling form."""
    arr, scalar = _as_array(s)
    _check_gamma_poles(arr)
    return _out(_digamma_core(arr.reshape(-1), opts).reshape(arr.shape), scalar)


def im_loggamma_half_asym(s):
    """Closed-form leading terms of Im log Gamma(s/2) (no O(1/|s|) term)."""
    arr, scalar = _as_array(s)
    sigma, t = arr.real, arr.imag
    if np.any(t <= 0):
        raise DomainError("im_loggamma_half_asym requires t > 0")
    if np.any(sigma <= 0.125):
        raise DomainError("im_loggamma_half_asym requires sigma > 1/8")
    val = (math.pi / 4) * (sigma - 1) - 0.5 * (sigma - 1) * np.arctan(sigma / t) \
        + (t / 2) * np.log(np.sqrt((sigma / 2) ** 2 + (t / 2) ** 2)) - t / 2
    return _real_out(val, scalar)


# ---------------------------------------------------------------- xi


def _xi_right(s: np.ndarray, opts: EvalOptions):
    """For Re s >= 1/2: (log-scale, unit-phase part) with xi = exp(scale) * part."""
    L = -0.5 * s * LOG_PI + _log_gamma_core(0.5 * s, opts)
    near1 = np.abs(s - 1.0) < 1e-6
    zs = np.empty_like(s)
    if np.any(~near1):
        zs[~near1] = (s[~near1] - 1.0) * _zeta_dispatch(s[~near1], opts, False)[0]
    if np.any(near1):
        u = s[near1] - 1.0
        zs[near1] = 1.0 + EULER_GAMMA * u - STIELTJES_1 * u * u
    part = np.exp(1j * L.imag) * (0.5 * s) * zs
    return L.real, part


def _xi_parts(s, opts: EvalOptions):
    arr, scalar = _as_array(s)
    flat = arr.reshape(-1)
    w = np.where(flat.real >= 0.5, flat, 1.0 - flat)
    scale, part = _xi_right(w, opts)
    return scale.reshape(arr.shape), part.reshape(arr.shape), scalar


def xi(s, opts: EvalOptions = DEFAULT_OPTIONS, *, reflect: bool = True):
    """Riemann xi function pi^(-s/2) (s/2) Gamma(s/2) (s-1) zeta(s).

    Points with Re s < 1/2 are evaluated as xi(1-s).  ``reflect=False``
    applies the defining product directly everywhere, which is what the
    functional-equation check compares against.
    """
    if not reflect:
        return _xi_direct(s, opts)
    scale, part, scalar = _xi_parts(s, opts)
    return _out(np.exp(scale) * part, scalar)


def _xi_direct(s, opts: EvalOptions):
    arr, scalar = _as_array(s)
    flat = arr.reshape(-1)
    out = np.empty_like(flat)
    right = flat.real >= 0.5
    if np.any(right):
        scale, part = _xi_right(flat[right], opts)
        out[right] = np.exp(scale) * part
    left = ~right
    if np.any(left):
        sl = flat[left]
        near0 = np.abs(sl) < 1e-6
        if np.any(near0):
            sc, pt = _xi_right(1.0 - sl[near0], opts)
            out[np.nonzero(left)[0][near0]] = np.exp(sc) * pt
        far = ~near0
        if np.any(far):
            sf = sl[far]
            L = -0.5 * sf * LOG_PI + _log_gamma_core(0.5 * sf, opts)
            zs = (sf - 1.0) * _zeta_dispatch(sf, opts, False)[0]
            out[np.nonzero(left)[0][far]] = np.exp(L) * (0.5 * sf) * zs
    return _out(out.reshape(arr.shape), scalar)


def xi_scaled(s, opts: EvalOptions = DEFAULT_OPTIONS):
    """xi(s) divided by a positive real factor exp(xi_log_scale(s)).

    Same argument and sign as xi, modulus of order |s|^2 |zeta|, so it stays
    representable at heights where xi itself underflows.
    """
    _, part, scalar = _xi_parts(s, opts)
    return _out(part, scalar)


def xi_log_scale(s, opts: EvalOptions = DEFAULT_OPTIONS):
    """log of the positive factor separating xi from xi_scaled."""
    scale, _, scalar = _xi_parts(s, opts)
    return _real_out(scale, scalar)


def _xi_logderiv_right(s: np.ndarray, opts: EvalOptions) -> np.ndarray:
    out = np.empty_like(s)
    near1 = np.abs(s - 1.0) < 1e-6
    base = 0.5 * _digamma_core(0.5 * s, opts) - 0.5 * LOG_PI
    if np.any(~near1):
        sf = s[~near1]
        z, dz, _ = _zeta_dispatch(sf, opts, True)
        if np.any(np.abs(z) <= 10.0 * opts.target_abs_err):
            raise NearZeroDivision("xi(s) is too close to zero for its log-derivative")
        out[~near1] = 1.0 / sf + 1.0 / (sf - 1.0) + dz / z + base[~near1]
    if np.any(near1):
        u = s[near1] - 1.0
        # 1/(s-1) + zeta'/zeta = g0 - (g0^2 + 2 g1) (s-1) + O((s-1)^2)
        out[near1] = 1.0 / s[near1] + EULER_GAMMA \
            - (EULER_GAMMA**2 + 2 * STIELTJES_1) * u + base[near1]
    return out


def xi_logderiv(s, opts: EvalOptions = DEFAULT_OPTIONS):
    """xi'(s)/xi(s); uses xi'/xi(s) = -xi'/xi(1-s) for Re s < 1/2."""
    arr, scalar = _as_array(s)
    flat = arr.reshape(-1)
    left = flat.real < 0.5
    w = np.where(left, 1.0 - flat, flat)
    val = _xi_logderiv_right(w, opts)
    val = np.where(left, -val, val)
    return _out(val.reshape(arr.shape), scalar)


# ---------------------------------------------------------------- pseudo Gamma


def nabla(s, p: PseudoGammaParams):
    """Pseudo Gamma function.

    With w = R^((s-1/2)/2) the defining fourth powers collapse to
    (w + 6 + 1/w)/4, which is evaluated from exp(+z) and exp(-z) so that the
    s <-> 1-s symmetry holds bit for bit and the critical line stays real.
    """
    arr, scalar = _as_array(s)
    z = (arr - 0.5) * (0.5 * p.log_R)
    if np.any(np.abs(z.real) > 700.0):
        raise Overflow("pseudo Gamma exponent beyond binary64 range")
    val = (np.exp(z) + np.exp(-z) + 6.0) / 4.0
    return _out(val, scalar)


def _nonzero_nabla(val: np.ndarray):
    if np.any(np.abs(val) < 1e-12):
        raise NearZeroDivision("pseudo Gamma value too close to zero")


def ratio_B(s, p: PseudoGammaParams, opts: EvalOptions = DEFAULT_OPTIONS):
    """B(s) = xi(s) / nabla(s)."""
    arr, scalar = _as_array(s)
    den = np.asarray(nabla(arr, p))
    _nonzero_nabla(den)
    return _out(np.asarray(xi(arr, opts)) / den, scalar)


def ratio_C(s, X: float, p: PseudoGammaParams, opts: EvalOptions = DEFAULT_OPTIONS):
    """C(s) = nabla(2 - X + s) / nabla(s)."""
    arr, scalar = _as_array(s)
    den = np.asarray(nabla(arr, p))
    _nonzero_nabla(den)
    return _out(np.asarray(nabla(2.0 - X + arr, p)) / den, scalar)


def ratio_Cprime(s, x: float, p: PseudoGammaParams, opts: EvalOptions = DEFAULT_OPTIONS):
    """C'(s) = nabla(s + x) / nabla(s) for -1 < x < 2."""
    if not -1.0 < x < 2.0:
        raise DomainError("ratio_Cprime requires -1 < x < 2")
    arr, scalar = _as_array(s)
    den = np.asarray(nabla(arr, p))
    _nonzero_nabla(den)
    return _out(np.asarray(nabla(arr + x, p)) / den, scalar)


def d_symmetrized(s, x: float, p: PseudoGammaParams, opts: EvalOptions = DEFAULT_OPTIONS):
    """D(s) = [B(x - 1/2 + s) + B(1/2 - x + s)] / 2 for 1/2 < x <= 2."""
    if not 0.5 < x <= 2.0:
        raise DomainError("d_symmetrized requires 1/2 < x <= 2")
    arr, scalar = _as_array(s)
    first = np.asarray(ratio_B(x - 0.5 + arr, p, opts))
    second = np.asarray(ratio_B(0.5 - x + arr, p, opts))
    return _out(0.5 * (first + second), scalar)


def log_nabla(s, p: PseudoGammaParams):
    """A logarithm of nabla(s), finite far beyond the range of :func:`nabla`.

    The imaginary part is a pointwise branch, not a continuous one.
    """
    arr, scalar = _as_array(s)
    z = (arr - 0.5) * (0.5 * p.log_R)
    z = np.where(z.real < 0, -z, z)
    val = z + np.log1p(6.0 * np.exp(-z) + np.exp(-2.0 * z)) - math.log(4.0)
    return _out(val, scalar)


def log_ratio_B(s, p: PseudoGammaParams, opts: EvalOptions = DEFAULT_OPTIONS):
    """A logarithm of B(s) (pointwise branch)."""
    arr, scalar = _as_array(s)
    scale, part, _ = _xi_parts(arr, opts)
    with np.errstate(divide="ignore"):
        val = scale + np.log(part.astype(np.complex128)) - np.asarray(log_nabla(arr, p))
    return _out(val, scalar)


def log_abs_d_symmetrized(s, x: float, p: PseudoGammaParams, opts: EvalOptions = DEFAULT_OPTIONS):
    """log|D(s)| for the symmetrized ratio, evaluated without overflow."""
    if not 0.5 < x <= 2.0:
        raise DomainError("d_symmetrized requires 1/2 < x <= 2")
    arr, scalar = _as_array(s)
    b1 = np.asarray(log_ratio_B(x - 0.5 + arr, p, opts))
    b2 = np.asarray(log_ratio_B(0.5 - x + arr, p, opts))
    m = np.maximum(b1.real, b2.real)
    m = np.where(np.isfinite(m), m, 0.0)
    with np.errstate(divide="ignore"):
        val = m + np.log(np.abs(np.exp(b1 - m) + np.exp(b2 - m))) - math.log(2.0)
    return _real_out(val, scalar)


def vectorize(f: Callable[[complex], complex]) -> Callable[[np.ndarray], np.ndarray]:
    """Lift a scalar complex function to arrays (for user-supplied callables)."""

    def wrapped(z):
        arr = np.asarray(z, dtype=np.complex128)
        out = np.array([complex(f(complex(v))) for v in arr.reshape(-1)], dtype=np.complex128)
        return out.reshape(arr.shape)

    return wrapped
