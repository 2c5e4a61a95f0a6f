import math

import numpy as np
import pytest

import pbglaser as pb


def test_version():
    assert pb.__version__ == "0.1.0"


def test_rates_at_pi_over_4():
    r = pb.dressed_rates({"drive": {"cos4phi": 0.25}, "g": 10.0})
    assert r["cos2phi"] == pytest.approx(0.5)
    assert r["gamma0"] == pytest.approx(1.0)
    assert r["gamma_plus"] == pytest.approx(0.25)
    assert r["gamma_minus"] == pytest.approx(0.25)
    assert r["g1"] == pytest.approx(5.0)
    assert r["omega2"] is None


def test_laser_drive_rates():
    r = pb.dressed_rates({"drive": {"epsilon": 1.0, "delta_a": 10.0}})
    assert r["omega2"] == pytest.approx(math.sqrt(104.0))
    assert r["cos2phi"] == pytest.approx(0.99029, rel=1e-5)


def test_steady_state_large_pump():
    s = pb.steady_state({"kappa": 1e-3, "drive": {"cos4phi": 0.5}, "gap": {"u_minus": False}})
    p1 = s["p1"]
    assert isinstance(p1, np.ndarray)
    assert p1.sum() == pytest.approx(1.0, abs=1e-9)
    assert p1[-1] < 1e-12
    assert s["observables"]["mean_n"] == pytest.approx(250.0, rel=0.03)


def test_vacuum_has_undefined_q():
    s = pb.steady_state({"drive": {"cos4phi": 0.0}}, n_max=30)
    assert s["p1"][0] == pytest.approx(1.0)
    assert s["observables"]["q_mandel"] is None


def test_errors_are_typed():
    with pytest.raises(pb.DomainError):
        pb.dressed_rates({"kappa": -1.0})
    with pytest.raises(pb.DomainError):
        pb.dressed_rates({"bogus": 1})
    with pytest.raises(pb.TruncationError):
        pb.steady_state({"kappa": 1e-3, "drive": {"cos4phi": 0.5}}, n_max=50)
    assert issubclass(pb.TruncationError, pb.Error)


def test_special_functions():
    assert pb.ln_gamma(5.0) == pytest.approx(math.log(24.0), rel=1e-14)
    assert pb.kummer_1f1_a1(1.0, 3.0) == pytest.approx(math.exp(3.0), rel=1e-14)


def test_analytic_distribution_matches_ladder():
    params = {"kappa": 1e-4, "drive": {"cos4phi": 0.8}}
    s = pb.steady_state(params)
    a = pb.analytic_distribution(params, s["n_max"])
    assert 0.5 * np.abs(a["p"] - s["p1"]).sum() <= 1e-2


def test_sweep_records():
    recs = pb.sweep({"kappa": 1e-3}, points=3, threads=2)
    assert len(recs) == 6
    assert [r["gap_config_label"] for r in recs[:2]] == ["no_gap", "gap"]
    assert all(r["status"] == "ok" for r in recs)
    assert recs[0]["q_mandel"] is None


def test_spectrum_doublet_below_threshold():
    params = {"kappa": 0.05, "g": 20.0, "drive": {"epsilon": 1.0, "delta_a": -10.0},
              "gap": {"u_minus": False}}
    sp = pb.spectrum(params, horizon=1000.0, grid="doublet", omega_points=2001)
    g1 = sp["rates"]["g1"]
    assert len(sp["peaks"]) == 2
    for w, sign in zip(sorted(sp["peaks"]), (-1.0, 1.0)):
        assert abs(w - sign * g1) <= 0.05 * g1
    assert sp["fwhm"] is None
    with pytest.raises(pb.HorizonError):
        pb.spectrum(params, horizon=5.0, omega_points=101)


def test_check_runs():
    c = pb.run_check("truncation")
    assert c["passed"]
    with pytest.raises(pb.DomainError):
        pb.run_check("nope")
