from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from xicensus.fitting import fit_log_bound, fit_power_law, running_max


@settings(max_examples=60, deadline=None)
@given(c=st.floats(0.1, 10.0), b=st.floats(-2.0, 3.0), noise=st.floats(0.0, 0.05), seed=st.integers(0, 2**32 - 1))
def test_power_law_recovers_exponent(c, b, noise, seed):
    rng = np.random.default_rng(seed)
    x = np.geomspace(1.0, 1e3, 40)
    y = c * x**b * np.exp(noise * rng.standard_normal(x.size))
    fit = fit_power_law(x, y)
    assert abs(fit.exponent - b) <= 0.05
    assert fit.n == 40


def test_power_law_exact():
    x = np.array([1.0, 2.0, 4.0, 8.0])
    fit = fit_power_law(x, 3 * x**1.5)
    assert fit.constant == pytest.approx(3.0, rel=1e-12)
    assert fit.exponent == pytest.approx(1.5, rel=1e-12)
    assert fit.r2 == pytest.approx(1.0)
    with pytest.raises(ValueError):
        fit_power_law([1.0], [1.0])
    with pytest.raises(ValueError):
        fit_power_law([1.0, 2.0], [1.0, -1.0])


def test_log_bound_exact_and_envelope():
    x = np.linspace(10, 400, 50)
    fit = fit_log_bound(x, 0.7 * np.log(x))
    assert fit.constant == pytest.approx(0.7, rel=1e-12)
    assert fit.exponent == pytest.approx(0.7, rel=1e-12)
    assert fit.r2 == pytest.approx(1.0)
    # oscillating data: the envelope fit must dominate most of the points
    y = np.log(x) * np.sin(x)
    env = fit_log_bound(x, y)
    assert env.exponent >= np.max(np.abs(y) / np.log(x)) - 1e-12
    assert env.constant >= fit_log_bound(x, y, envelope=False).constant
    with pytest.raises(ValueError):
        fit_log_bound([0.5, 2.0], [1.0, 1.0])


@given(st.lists(st.floats(-1e6, 1e6), min_size=1, max_size=50))
def test_running_max_is_monotone_envelope(values):
    env = running_max(values)
    assert np.all(np.diff(env) >= 0)
    assert np.all(env >= np.abs(values))
