import json
import math
import os
import subprocess

import numpy as np
import pytest

import uavmec


def test_lambert_w0():
    assert uavmec.lambert_w0(math.e) == pytest.approx(1.0, abs=1e-14)
    assert uavmec.lambert_w0(0.0) == 0.0
    with pytest.raises(ValueError):
        uavmec.lambert_w0(-1.0)


def test_config_defaults_and_units():
    cfg = uavmec.config()
    assert cfg["bandwidth_hz"] == 20e6
    assert len(cfg["ues"]) == 4
    assert uavmec.config({"ref_gain": "-30 dB"})["ref_gain"] == pytest.approx(1e-3)
    with pytest.raises(uavmec.ConfigError):
        uavmec.config({"no_such_key": 1})


@pytest.fixture(scope="module")
def reference_run():
    return uavmec.solve()


def test_solve_reference(reference_run):
    r = reference_run
    assert r.converged
    assert r.violations == []
    assert r.tec == pytest.approx(155.87, rel=1e-3)
    # UAV energy covers computing, forwarding and propulsion.
    assert r.tec == pytest.approx(r.ue_energy + r.uav_energy, rel=1e-12)
    assert 0 < r.fly_energy < r.uav_energy
    assert all(b <= a * (1 + 1e-9) for a, b in zip(r.tec_trace, r.tec_trace[1:]))
    assert r.trajectory.shape == (51, 2)
    assert r.local.shape == (4, 50)
    total = r.local + r.ue_offload
    np.testing.assert_allclose(total.sum(axis=1), 4e8, rtol=1e-9)


def test_feasibility_recheck(reference_run):
    tec, violations = uavmec.check_feasibility(None, reference_run)
    assert violations == []
    assert tec == pytest.approx(reference_run.tec, rel=1e-12)


def test_baselines_are_dominated(reference_run):
    assert "equal_bandwidth" in uavmec.baseline_names()
    local = uavmec.run_baseline("local_computing")
    assert local.tec == pytest.approx(2.56e5 + 159.8214, rel=1e-9)
    assert reference_run.tec <= local.tec
    with pytest.raises(uavmec.ConfigError):
        uavmec.run_baseline("nonsense")


def test_summary_and_write(reference_run, tmp_path):
    summary = json.loads(reference_run.summary_json())
    assert summary["scheme"] == "proposed"
    reference_run.write(str(tmp_path))
    assert (tmp_path / "trajectory.csv").exists()
    assert json.loads((tmp_path / "summary.json").read_text())["tec_j"] == summary["tec_j"]


@pytest.mark.skipif("UAVMEC_CLI" not in os.environ, reason="CLI path not provided")
def test_cli_validate(tmp_path):
    cli = os.environ["UAVMEC_CLI"]
    bad = tmp_path / "bad.json"
    bad.write_text('{"slots": 0}')
    assert subprocess.run([cli, "validate", str(bad)], capture_output=True).returncode == 2
    assert subprocess.run([cli, "validate"], capture_output=True).returncode == 0
