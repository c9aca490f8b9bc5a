"""Least-squares growth-law fits shared by the verification suites."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class Fit:
    constant: float
    exponent: float
    r2: float
    n: int


def fit_power_law(x, y) -> Fit:
    """Fit y = c * x**b by ordinary least squares on (log x, log y).

    R^2 is the usual centred coefficient of the log-log regression.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.size < 2 or np.any(x <= 0) or np.any(y <= 0):
        raise ValueError("power-law fit needs at least two positive points")
    lx, ly = np.log(x), np.log(y)
    A = np.column_stack([np.ones_like(lx), lx])
    (a, b), *_ = np.linalg.lstsq(A, ly, rcond=None)
    resid = ly - (a + b * lx)
    ss_tot = float(np.sum((ly - ly.mean()) ** 2))
    r2 = 1.0 - float(np.sum(resid**2)) / ss_tot if ss_tot > 0 else 1.0
    return Fit(float(np.exp(a)), float(b), r2, int(x.size))


def running_max(y) -> np.ndarray:
    return np.maximum.accumulate(np.abs(np.asarray(y, dtype=float)))


def fit_log_bound(x, y, *, envelope: bool = True) -> Fit:
    """Fit c in |y| <= c * log x.

    The running maximum of |y| (the envelope a bound has to dominate) is
    regressed on log x through the origin; R^2 is the uncentred coefficient
    appropriate to a no-intercept model.  ``exponent`` holds the smallest c
    that actually dominates every point.
    """
    x = np.asarray(x, dtype=float)
    y = np.abs(np.asarray(y, dtype=float))
    if x.size < 2 or np.any(x <= 1):
        raise ValueError("log fit needs at least two points with x > 1")
    target = running_max(y) if envelope else y
    lx = np.log(x)
    c = float(np.dot(lx, target) / np.dot(lx, lx))
    ss_tot = float(np.dot(target, target))
    r2 = 1.0 - float(np.sum((target - c * lx) ** 2)) / ss_tot if ss_tot > 0 else 1.0
    return Fit(c, float(np.max(y / lx)), r2, int(x.size))
