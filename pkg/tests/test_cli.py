import json
import os

import pytest

from fbshock.cli import main

CFG = """
name: cli
right_state: {v: 2, u: 0, theta: 1}
strength: 0.5
perturbation: {shape: gaussian_bump, amplitude: 0.01}
grid: {N: 400}
t_end: 5
t_end_units: absolute
"""


@pytest.fixture
def cfg(tmp_path):
    p = tmp_path / "c.yaml"
    p.write_text(CFG)
    return str(p)


def test_hugoniot(cfg, tmp_path, capsys):
    assert main(["hugoniot", "--config", cfg, "--out", str(tmp_path)]) == 0
    out = capsys.readouterr().out
    assert "v_minus" in out and "[PASS]" in out
    rec = json.load(open(tmp_path / "cli" / "hugoniot.json"))
    assert rec["v_minus"] == pytest.approx(1.5)


def test_profile_and_shift(cfg, tmp_path):
    assert main(["profile", "--config", cfg, "--out", str(tmp_path), "--quiet"]) == 0
    assert open(tmp_path / "cli" / "profile.csv").readline().strip() == "xi,V,U,Theta"
    summary = json.load(open(tmp_path / "cli" / "profile_summary.json"))
    assert {"endpoint_tol", "c1_hat", "c2_hat"} <= set(summary)
    assert main(["shift", "--config", cfg, "--out", str(tmp_path), "--quiet"]) == 0


def test_shift_from_file(cfg, tmp_path):
    assert main(["simulate", "--config", cfg, "--out", str(tmp_path), "--quiet"]) == 0
    series = tmp_path / "cli" / "series.csv"
    assert series.exists()
    # feed an explicit initial-data file
    import numpy as np
    from fbshock.config import parse_config
    from fbshock.harness import prepare, write_snapshot
    ex = prepare(parse_config(CFG))
    init = tmp_path / "init.csv"
    write_snapshot(ex.state0, str(init))
    assert main(["shift", "--config", cfg, "--initial", str(init), "--out", str(tmp_path),
                 "--quiet"]) == 0
    rec = json.load(open(tmp_path / "cli" / "shift.json"))
    assert rec["alpha"] == pytest.approx(ex.shift.alpha, rel=1e-12)


def test_quiet_and_env_default(cfg, tmp_path, monkeypatch, capsys):
    monkeypatch.setenv("FBSHOCK_OUTPUT_DIR", str(tmp_path / "env"))
    assert main(["hugoniot", "--config", cfg, "--quiet"]) == 0
    assert capsys.readouterr().out == ""
    assert (tmp_path / "env" / "cli" / "hugoniot.json").exists()


def test_exit_codes(tmp_path, capsys):
    bad = tmp_path / "bad.yaml"
    bad.write_text(CFG + "viscocity: 2\n")
    assert main(["hugoniot", "--config", str(bad)]) == 2
    assert "viscocity" in capsys.readouterr().err
    assert main(["profile", "--out", str(tmp_path)]) == 2  # missing --config
    cold = tmp_path / "cold.yaml"
    cold.write_text("right_state: {v: 2, u: 0, theta: 1}\ntheta_minus: 0.5\n")
    assert main(["hugoniot", "--config", str(cold), "--out", str(tmp_path)]) == 3
    # a verdict that cannot pass at this resolution gives exit code 1
    failing = tmp_path / "fail.yaml"
    failing.write_text(CFG + "checks: [stability]\n")
    assert main(["simulate", "--config", str(failing), "--out", str(tmp_path), "--quiet"]) == 1


def test_verify_builtin_subset(tmp_path):
    assert main(["verify", "--criteria", "1,2", "--out", str(tmp_path), "--quiet"]) == 0
    assert len(json.load(open(tmp_path / "verify.json"))) == 2


def test_sweep_command(tmp_path, capsys):
    doc = tmp_path / "s.yaml"
    doc.write_text("""
base:
  name: bs
  right_state: {v: 2, u: 0, theta: 1}
  strength: 0.5
  grid: {N: 400}
  t_end: 0
sweep:
  beta: [10, 20, 40]
""")
    assert main(["sweep", "--config", str(doc), "--out", str(tmp_path)]) == 0
    out = capsys.readouterr().out
    assert "alpha_decreasing" in out and "[PASS]" in out
    assert (tmp_path / "sweep.csv").exists()
