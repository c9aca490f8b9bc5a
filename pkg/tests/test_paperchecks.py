from __future__ import annotations

import json
import math

import mpmath as mp
import numpy as np
import pytest

from xicensus import paperchecks as pc
from xicensus import specfun
from xicensus.census import XI_TRACK
from xicensus.paperchecks import CheckReport

KEYS = ["check_id", "params", "n_samples", "max_residual", "bound_value", "fitted_constant", "pass"]


def quadruple(beta: float, gamma: float):
    roots = np.array([beta + 1j * gamma, beta - 1j * gamma, 1 - beta + 1j * gamma, 1 - beta - 1j * gamma])

    def f(s):
        s = np.asarray(s, dtype=complex)
        return np.asarray(specfun.xi_scaled(s)) * np.prod(s[..., None] - roots, axis=-1)

    return f


def _valid(rep: CheckReport, check_id: str):
    assert rep.check_id == check_id
    assert rep.n_samples > 0
    assert isinstance(rep.passed, bool)
    assert list(rep.to_dict()) == KEYS
    json.loads(pc.reports_to_json([rep]))


@pytest.mark.parametrize("name,kwargs", [
    ("functional_equation", {"n": 40}),
    ("zeta_agreement", {"n": 40}),
    ("binet_bound", {"n": 100}),
    ("im_loggamma", {}),
])
def test_cheap_suites_pass(name, kwargs):
    rep = pc.SUITES[name](**kwargs)
    _valid(rep, name)
    assert rep.passed
    assert rep.max_residual <= rep.bound_value


def test_zeta_bound_suite():
    rep = pc.check_zeta_bound(t_grid=np.geomspace(10, 200, 12))
    _valid(rep, "zeta_bound")
    assert rep.passed and rep.fitted_constant > 0


def test_nabla_suite():
    rep = pc.check_nabla_suite(Y_grid=(10.0, 40.0))
    _valid(rep, "nabla")
    assert rep.passed
    assert rep.params["critical_line_min"] >= 1 - 1e-12 and rep.params["critical_line_max"] <= 2 + 1e-12


def test_local_expansion_suite():
    rep = pc.check_local_expansion(t_grid=np.array([20.0, 60.0, 120.0]))
    _valid(rep, "local_expansion")
    assert rep.passed


def test_xi_logderiv_sum_converges():
    assert pc.XI_LOGDERIV_CONST == pytest.approx(-0.0230957089661210, abs=1e-15)
    assert complex(specfun.xi_logderiv(0.0)).real == pytest.approx(pc.XI_LOGDERIV_CONST, abs=1e-10)
    rep = pc.check_xi_logderiv_sum(s_grid=(2.0, 3.0 + 5j))
    _valid(rep, "xi_logderiv_sum")
    assert rep.passed


def test_seeded_runs_are_deterministic():
    a = pc.reports_to_json(pc.run_suites(["functional_equation", "binet_bound"], seed=3))
    b = pc.reports_to_json(pc.run_suites(["functional_equation", "binet_bound"], seed=3, threads=2))
    assert a == b
    c = pc.reports_to_json(pc.run_suites(["functional_equation"], seed=4))
    assert c != a.split("},\n  {")[0]
    with pytest.raises(KeyError):
        pc.run_suites(["nope"])


def test_json_encoding():
    rep = CheckReport("x", {"v": 0.1, "z": 1 + 2j, "inf": math.inf, "arr": np.array([1.0, 2.5])},
                      3, 1 / 3, None, float("nan"), True)
    text = pc.reports_to_json([rep])
    data = json.loads(text)
    assert list(data[0]) == KEYS
    assert "0.33333333333333331" in text and "0.10000000000000001" in text
    assert data[0]["fitted_constant"] is None and data[0]["params"]["inf"] is None
    assert data[0]["params"]["z"] == [1.0, 2.0]
    assert data[0]["pass"] is True and data[0]["bound_value"] is None
    assert data[0]["max_residual"] == 1 / 3


def test_gamma_part_limit():
    y = np.array([400.0, 4000.0, 40000.0])
    for x in (0.75, 1.5, 2.0):
        vals = pc.gamma_part(x, y)
        assert vals[-1] == pytest.approx(-math.pi / 4 * (x - 0.5), abs=1e-3)
        ref = float(mp.im(mp.loggamma(mp.mpc(0.5, 400) / 2) - mp.loggamma(mp.mpc(x, 400) / 2)))
        assert vals[0] == pytest.approx(ref, abs=1e-12)
    # the threshold where |Gamma part| crosses 1
    assert abs(pc.gamma_part(0.5 + 4 / math.pi - 0.05, 1e5)) < 1 < abs(pc.gamma_part(0.5 + 4 / math.pi + 0.05, 1e5))


def test_proposition1_small_grid():
    rep = pc.proposition1_experiment(0.75, np.arange(20.0, 81.0, 20.0))
    _valid(rep, "proposition1")
    assert rep.params["gamma_part_ok"]
    rep2 = pc.proposition1_experiment(2.0, np.arange(20.0, 81.0, 20.0))
    assert not rep2.params["gamma_part_ok"] and not rep2.passed
    with pytest.raises(ValueError):
        pc.proposition1_experiment(2.5)


def test_proposition2_point_paths_agree():
    pt = pc.proposition2_point(0.75, 30.0)
    assert pt.combined == pytest.approx(pt.direct, abs=1e-6)
    assert abs(pt.EX) <= (pt.m + 1) * math.pi
    assert pt.m_prime >= 0


def test_dj_decomposition_on_xi():
    row = pc.dj_decomposition(0.6, 40.0)
    assert row.consistent
    assert round(row.reconstructed_count) == 0
    assert abs(row.correction) < 1e-6


def test_dj_decomposition_planted_zero():
    row = pc.dj_decomposition(0.9, 50.0, f=quadruple(0.8, 30.0))
    assert row.reconstructed_count == pytest.approx(1.0, abs=0.01)
    assert row.winding_count == 1 and row.census_count == 1
    assert row.consistent


def test_suite_registry():
    assert len(pc.SUITES) == 12
    assert XI_TRACK.density == 2.0
