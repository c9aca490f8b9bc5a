"""Critical-line zero census, argument-principle counts, and the separation
parameter used to keep contours away from zeros."""

from __future__ import annotations

import csv
import functools
import io
import logging
import math
import os
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from . import specfun
from .argtrack import Contour, TrackOptions, winding_number
from .errors import (
    CensusIncomplete,
    ContourThroughZero,
    DomainError,
    NonIntegerWinding,
    StepTooCoarse,
)
from .specfun import DEFAULT_OPTIONS, EvalOptions

log = logging.getLogger(__name__)

HEIGHT_CAP = 500.0
GAP_HEIGHT_CAP = 1000.0
SCAN_STEP = 0.1
BRACKET_WIDTH = 1e-9
NUDGE = 0.05
# initial argument samples per unit length when tracking xi
XI_TRACK = TrackOptions(density=2.0)


@dataclass(frozen=True)
class ZeroRecord:
    index: int
    gamma: float
    bracket_lo: float
    bracket_hi: float
    residual: float


@dataclass
class CensusResult:
    zeros: list[ZeroRecord]
    height: float
    count_by_winding: int
    rvm_main: float


@dataclass
class DensityCount:
    """Zero counts around the critical line up to height Y.

    ``rectangle_count`` is half the winding around [1-X, X] x [-Y, Y],
    ``full_count`` half the winding around [-1, 2] x [-Y, Y], and
    ``critical_count`` the critical-line census below Y.
    """

    lam: float
    height: float
    epsilon: float
    X: float
    Y: float
    rectangle_count: int
    full_count: int
    critical_count: int
    nudges: list[float] = field(default_factory=list)
    located: list[complex] = field(default_factory=list)

    @property
    def strip_off_line(self) -> int:
        """Zeros off the critical line with 1 - X < beta < X, gamma > 0."""
        return self.rectangle_count - self.critical_count

    @property
    def beyond_X(self) -> int:
        """Zeros with beta > X and 0 < gamma < Y."""
        return (self.full_count - self.rectangle_count) // 2

    @property
    def off_line(self) -> int:
        """All zeros with 0 < gamma < Y off the critical line."""
        return self.full_count - self.critical_count


_THREADS: int | None = None


def set_default_threads(n: int | None) -> None:
    """Override the worker count used when a call does not pass one."""
    global _THREADS
    if n is not None and n < 1:
        raise ValueError("thread count must be >= 1")
    _THREADS = n


def default_threads() -> int:
    if _THREADS is not None:
        return _THREADS
    env = os.environ.get("ZETA_CENSUS_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            log.warning("ignoring non-integer ZETA_CENSUS_THREADS=%r", env)
    return 1


def critical_line_values(t, opts: EvalOptions = DEFAULT_OPTIONS, threads: int = 1) -> np.ndarray:
    """Real values of xi on the critical line (scaled by a positive factor)."""
    t = np.asarray(t, dtype=np.float64)
    s = 0.5 + 1j * t
    if threads <= 1 or t.size < 512:
        return np.asarray(specfun.xi_scaled(s, opts)).real
    chunks = np.array_split(s, threads * 4)
    with ThreadPoolExecutor(max_workers=threads) as pool:
        parts = list(pool.map(lambda c: np.asarray(specfun.xi_scaled(c, opts)), chunks))
    return np.concatenate(parts).real


def _refine_dip(t_lo: float, t_hi: float, opts: EvalOptions, levels: int = 6):
    """Resample a no-sign-change dip on successively halved steps.

    Returns the sign-change brackets found (possibly empty)."""
    step = (t_hi - t_lo) / 2
    for _ in range(levels):
        step /= 2
        n = int(round((t_hi - t_lo) / step))
        tt = t_lo + step * np.arange(n + 1)
        zz = critical_line_values(tt, opts)
        change = np.nonzero(np.sign(zz[1:]) != np.sign(zz[:-1]))[0]
        if change.size:
            return [(tt[i], tt[i + 1], zz[i]) for i in change], None
    # no crossing resolved; report how deep the dip went
    return [], float(np.min(np.abs(zz)) / np.max(np.abs(zz)))


def _bisect(lo: np.ndarray, hi: np.ndarray, sign_lo: np.ndarray, opts: EvalOptions):
    lo, hi = lo.copy(), hi.copy()
    while np.max(hi - lo) > BRACKET_WIDTH:
        mid = 0.5 * (lo + hi)
        zm = critical_line_values(mid, opts)
        same = np.sign(zm) == sign_lo
        exact = zm == 0
        lo = np.where(same & ~exact, mid, lo)
        hi = np.where(~same & ~exact, mid, hi)
        if np.any(exact):
            lo = np.where(exact, np.nextafter(mid, -np.inf), lo)
            hi = np.where(exact, np.nextafter(mid, np.inf), hi)
    return lo, hi


@functools.lru_cache(maxsize=32)
def _census(T: float, opts: EvalOptions, step: float) -> tuple[ZeroRecord, ...]:
    n = int(math.ceil(T / step - 1e-9))
    t = np.minimum(step * np.arange(1, n + 1), T)
    z = critical_line_values(t, opts, default_threads())
    brackets = []
    change = np.nonzero(np.sign(z[1:]) != np.sign(z[:-1]))[0]
    for i in change:
        brackets.append((t[i], t[i + 1], z[i]))
    # dips of |z| with no sign change may hide a close pair
    az = np.abs(z)
    for i in range(1, t.size - 1):
        if az[i] < az[i - 1] and az[i] <= az[i + 1] and np.sign(z[i - 1]) == np.sign(z[i]) == np.sign(z[i + 1]):
            found, depth = _refine_dip(t[i - 1], t[i + 1], opts)
            if found:
                log.debug("dip near t=%.4f resolved into %d sign changes", t[i], len(found))
                brackets = [b for b in brackets if not (t[i - 1] <= b[0] < t[i + 1])]
                brackets.extend(found)
            elif depth is not None and depth < 1e-6:
                raise StepTooCoarse(f"unresolved near-zero dip of xi at t={t[i]:.6f}")
    brackets.sort()
    if not brackets:
        return ()
    lo = np.array([b[0] for b in brackets])
    hi = np.array([b[1] for b in brackets])
    sign_lo = np.sign(np.array([b[2] for b in brackets]))
    lo, hi = _bisect(lo, hi, sign_lo, opts)
    gamma = 0.5 * (lo + hi)
    residual = np.abs(np.asarray(specfun.xi(0.5 + 1j * gamma, opts)))
    return tuple(ZeroRecord(k + 1, float(g), float(a), float(b), float(r))
                 for k, (g, a, b, r) in enumerate(zip(gamma, lo, hi, residual)))


def locate_critical_zeros(T: float, opts: EvalOptions = DEFAULT_OPTIONS, *,
                          height_cap: float = HEIGHT_CAP, step: float = SCAN_STEP) -> list[ZeroRecord]:
    """Zeros 1/2 + i*gamma with 0 < gamma <= T, from sign changes of real xi."""
    if not 2 < T <= height_cap:
        raise DomainError(f"height must satisfy 2 < T <= {height_cap:g}, got {T!r}")
    return list(_census(float(T), opts, float(step)))


_ORDINATES: dict[EvalOptions, tuple[float, np.ndarray]] = {}
_ORDINATES_LOCK = threading.Lock()


def _ordinates_up_to(h: float, opts: EvalOptions) -> np.ndarray:
    """Census ordinates up to at least h, from a shared census grown in steps of 100."""
    with _ORDINATES_LOCK:
        top, gammas = _ORDINATES.get(opts, (0.0, np.empty(0)))
        if h > top:
            top = 100.0 * math.ceil(h / 100.0)
            gammas = np.array([z.gamma for z in _census(top, opts, SCAN_STEP)])
            _ORDINATES[opts] = (top, gammas)
    return gammas[gammas <= h] if h < top else gammas


def clear_caches() -> None:
    """Forget memoised census results (used for cold-start timing)."""
    _census.cache_clear()
    with _ORDINATES_LOCK:
        _ORDINATES.clear()


def rvm_main_term(T: float) -> float:
    """Main term (T/2pi) log(T/2pi) - T/2pi + 7/8 of the zero-counting function."""
    if not T > 2 * math.pi:
        raise DomainError("rvm_main_term requires T > 2 pi")
    x = T / (2 * math.pi)
    return x * math.log(x) - x + 7 / 8


def _near_ordinate(y: float, gammas: np.ndarray, gap: float = NUDGE) -> bool:
    return bool(gammas.size and np.min(np.abs(gammas - y)) < gap)


def count_zeros_NT(T: float, opts: EvalOptions = DEFAULT_OPTIONS, *,
                   height_cap: float = HEIGHT_CAP, threads: int | None = None,
                   f: Callable | None = None) -> int:
    """N(T) as half the winding of xi around [-1, 2] x [-T, T]."""
    if not 2 < T <= height_cap:
        raise DomainError(f"height must satisfy 2 < T <= {height_cap:g}, got {T!r}")
    gammas = _ordinates_up_to(T + 2 * NUDGE, opts)
    if _near_ordinate(T, gammas):
        suggested = T
        while _near_ordinate(suggested, gammas):
            suggested += NUDGE
        raise ContourThroughZero(f"height {T} is within {NUDGE} of a zero ordinate", suggested)
    rect = Contour((2 - 1j * T, 2 + 1j * T, -1 + 1j * T, -1 - 1j * T))
    fn = f or (lambda s: specfun.xi_scaled(s, opts))
    w = winding_number(fn, rect, XI_TRACK, threads or default_threads())
    if w % 2:
        raise NonIntegerWinding(f"rectangle winding {w} is odd; conjugate pairing violated", w)
    return w // 2


def nudged_height(T: float, opts: EvalOptions = DEFAULT_OPTIONS, reach: float = 0.0) -> tuple[float, list[float]]:
    """Shift T upward by NUDGE until [T - NUDGE, T + reach + NUDGE] holds no ordinate."""
    nudges = []
    while True:
        gammas = _ordinates_up_to(T + reach + 2 * NUDGE, opts)
        if not np.any((gammas > T - NUDGE) & (gammas < T + reach + NUDGE)):
            return T, nudges
        T += NUDGE
        nudges.append(NUDGE)


def min_zero_gap(T: float, opts: EvalOptions = DEFAULT_OPTIONS, *,
                 height_cap: float = GAP_HEIGHT_CAP) -> float:
    """Smallest distance between zeros (with conjugates and reflections) of height <= 2T."""
    if 2 * T > height_cap:
        raise CensusIncomplete(f"census up to {2 * T:g} exceeds the cap {height_cap:g}")
    gammas = _ordinates_up_to(2 * T, opts)
    gammas = gammas[gammas <= 2 * T]
    if gammas.size == 0:
        return math.inf
    # critical-line zeros: 1 - rho coincides with conj(rho)
    gap = 2 * gammas[0]
    if gammas.size > 1:
        gap = min(gap, float(np.min(np.diff(gammas))))
    return float(gap)


def epsilon_choice(lam: float, T: float, opts: EvalOptions = DEFAULT_OPTIONS) -> float:
    """0.9 times min{gap/5, (lambda - 1/2)/2, T/9}."""
    if not 0.5 < lam < 1:
        raise DomainError("lambda must satisfy 1/2 < lambda < 1")
    if lam - 0.5 <= 1e-8:
        raise DomainError("lambda too close to 1/2 for the contour to separate from the critical line")
    gap = min_zero_gap(T, opts)
    return 0.9 * min(gap / 5, (lam - 0.5) / 2, T / 9)


def count_zeros_density(lam: float, T: float, opts: EvalOptions = DEFAULT_OPTIONS, *,
                        height_cap: float = HEIGHT_CAP, threads: int | None = None,
                        f: Callable | None = None, localize: bool = True) -> DensityCount:
    """Half the winding of xi around [1-X, X] x [-Y, Y] with X = lambda - eps, Y = T + eps,
    next to the full-strip winding and the critical-line census count up to Y."""
    if not 0.5 < lam < 1:
        raise DomainError("lambda must satisfy 1/2 < lambda < 1")
    if not 2 < T <= height_cap:
        raise DomainError(f"height must satisfy 2 < T <= {height_cap:g}, got {T!r}")
    eps = epsilon_choice(lam, T, opts)
    T_eff, nudges = nudged_height(T, opts, reach=eps)
    X, Y = lam - eps, T_eff + eps
    rect = Contour((X - 1j * Y, X + 1j * Y, 1 - X + 1j * Y, 1 - X - 1j * Y))
    fn = f or (lambda s: specfun.xi_scaled(s, opts))
    threads = threads or default_threads()
    w = winding_number(fn, rect, XI_TRACK, threads)
    full = Contour((2 - 1j * Y, 2 + 1j * Y, -1 + 1j * Y, -1 - 1j * Y))
    w_full = winding_number(fn, full, XI_TRACK, threads)
    if w % 2 or w_full % 2 or (w_full - w) % 4:
        raise NonIntegerWinding(f"windings {w}, {w_full} violate the conjugate and reflection pairing", w)
    gammas = _ordinates_up_to(Y + 1.0, opts)
    critical = int(np.count_nonzero(gammas < Y))
    result = DensityCount(lam, T, eps, X, Y, w // 2, w_full // 2, critical, nudges)
    if result.strip_off_line < 0:
        raise CensusIncomplete(
            f"winding count {result.rectangle_count} below census count {critical}: census missed a sign change")
    if result.off_line > 0:
        log.warning("%d zeros off the critical line below height %g (lambda=%g)", result.off_line, Y, lam)
        if localize:
            boxes = localize_zeros(fn, complex(0.5 + 1e-3, 0.0), complex(2.0, Y))
            result.located = [0.5 * (a + b) for a, b, _ in boxes]
    return result


def localize_zeros(f: Callable, lo: complex, hi: complex, min_size: float = 1e-3,
                   opts: TrackOptions = XI_TRACK) -> list[tuple[complex, complex, int]]:
    """Bisect the box [lo, hi] into sub-boxes and return (lo, hi, count) of the
    smallest boxes that still enclose zeros of f."""
    box = Contour((lo, complex(hi.real, lo.imag), hi, complex(lo.real, hi.imag)))
    n = winding_number(f, box, opts)
    if n == 0:
        return []
    w, h = hi.real - lo.real, hi.imag - lo.imag
    if max(w, h) <= min_size:
        return [(lo, hi, n)]
    if w >= h:
        mid = lo.real + w / 2
        halves = [(lo, complex(mid, hi.imag)), (complex(mid, lo.imag), hi)]
    else:
        mid = lo.imag + h / 2
        halves = [(lo, complex(hi.real, mid)), (complex(lo.real, mid), hi)]
    out = []
    for a, b in halves:
        out.extend(localize_zeros(f, a, b, min_size, opts))
    return out


def run_census(T: float, opts: EvalOptions = DEFAULT_OPTIONS, *, height_cap: float = HEIGHT_CAP,
               threads: int | None = None) -> CensusResult:
    """Census plus winding cross-check; a count mismatch is a hard failure."""
    zeros = locate_critical_zeros(T, opts, height_cap=height_cap)
    count = count_zeros_NT(T, opts, height_cap=height_cap, threads=threads)
    if count != len(zeros):
        raise CensusIncomplete(
            f"winding gives N({T})={count} but the critical-line census found {len(zeros)}")
    return CensusResult(zeros, T, count, rvm_main_term(T) if T > 2 * math.pi else float("nan"))


CSV_HEADER = ("index", "gamma", "bracket_lo", "bracket_hi", "residual")


def write_census_csv(zeros: Sequence[ZeroRecord], dest) -> None:
    """Write the census as CSV (15 significant digits, LF line endings)."""
    if isinstance(dest, (str, Path)):
        with open(dest, "w", newline="", encoding="utf-8") as fh:
            write_census_csv(zeros, fh)
        return
    writer = csv.writer(dest, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for z in zeros:
        writer.writerow([z.index] + [format(v, ".15g") for v in (z.gamma, z.bracket_lo, z.bracket_hi, z.residual)])


def census_csv_text(zeros: Sequence[ZeroRecord]) -> str:
    buf = io.StringIO()
    write_census_csv(zeros, buf)
    return buf.getvalue()
