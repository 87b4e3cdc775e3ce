import math

import numpy as np
import pytest

import ringjsa

SMALL = {"campaign": {"n_signal": 6, "n_idler": 8}, "schmidt": {"grid_points": 41}}


def test_default_config_round_trips():
    cfg = ringjsa.default_config()
    assert cfg["ring"]["tau_e_s_ps"] == pytest.approx(23.7)
    assert cfg["campaign"]["n_signal"] == 10


def test_bad_config_raises():
    with pytest.raises(ringjsa.ConfigError, match="ring.tau_e_s_ps"):
        ringjsa.campaign_truth({"ring": {"tau_e_s_ps": -1}})


def test_field_enhancement_on_resonance():
    w0 = 2 * math.pi * 299792458.0 / 1561.60e-9
    fe = ringjsa.field_enhancement([w0], "signal")[0]
    assert abs(fe.real) < 1e-12 * abs(fe)
    assert fe.imag > 0
    t = ringjsa.through_transfer([w0 + 1e17])[0]
    assert abs(t - 1) < 1e-4


def test_campaign_truth_and_schmidt():
    truth = ringjsa.campaign_truth(SMALL)
    phi = np.asarray(truth["values"])
    assert phi.shape == (6, 8)
    k, sv = ringjsa.schmidt_number(phi)
    ki, _ = ringjsa.schmidt_number(phi, intensity_only=True)
    assert k >= ki >= 1.0
    assert sum(s * s for s in sv) == pytest.approx(1.0)


def test_fidelities():
    a = np.random.default_rng(1).random((5, 7))
    assert ringjsa.fidelity_intensity(a, 2 * a) == pytest.approx(100.0)
    z = a * np.exp(1j * a)
    f, offset = ringjsa.fidelity_complex(z, z * np.exp(0.4j))
    assert f == pytest.approx(100.0)
    assert offset == pytest.approx(-0.4)


def test_fringe_fit():
    sched = [2 * math.pi * k / 30 for k in range(30)]
    counts = [1.0 * math.cos(t + 0.7) + 2.0 for t in sched]
    fit = ringjsa.fit_fringe_point(sched, counts)
    assert fit["delta"] == pytest.approx(0.7, abs=1e-9)
    assert fit["amplitude"] == pytest.approx(1.0, abs=1e-9)


def test_pipeline_chain(tmp_path):
    ringjsa.simulate(tmp_path / "truth", SMALL)
    ringjsa.synthesize(tmp_path / "truth", tmp_path / "meas", SMALL)
    summary = ringjsa.reconstruct(tmp_path / "meas", tmp_path / "res")
    assert summary["valid_points"] > 0
    metrics = ringjsa.report(tmp_path / "res", tmp_path / "truth", trials=3)
    assert metrics["fidelity"]["self_complex"] == pytest.approx(100.0)
    jsa = ringjsa.read_jsa(str(tmp_path / "res" / "jsa.bin"))
    assert np.asarray(jsa["values"]).shape == (6, 8)
