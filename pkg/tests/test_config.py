import json
import math

import pytest
import yaml
from hypothesis import given, settings, strategies as st

from fbshock.config import (RunConfig, config_from_dict, default_output_dir, parse_config,
                            parse_sweep)
from fbshock.errors import ConfigError

MINIMAL = "right_state: {v: 2, u: 0, theta: 1}\ntheta_minus: 1.125\n"


def test_minimal_document_gets_defaults():
    cfg = parse_config(MINIMAL)
    assert cfg.params.gamma == 1.4
    assert (cfg.params.R, cfg.params.mu, cfg.params.kappa) == (1.0, 1.0, 1.0)
    assert cfg.grid.N == 2000
    assert cfg.ctrl.cfl == 0.4
    assert cfg.perturbation.shape == "none"


def test_partial_params_keep_gamma_default():
    cfg = parse_config(MINIMAL + "params: {mu: 2.0}\n")
    assert cfg.params.gamma == 1.4 and cfg.params.mu == 2.0


def test_json_is_accepted():
    doc = {"right_state": {"v": 2, "u": 0, "theta": 1}, "strength": 0.5, "grid": {"N": 400}}
    assert parse_config(json.dumps(doc)).grid.N == 400


def test_grid_minimum():
    with pytest.raises(ConfigError, match="N below minimum"):
        parse_config(MINIMAL + "grid: {N: 100}\n")


@pytest.mark.parametrize("extra,key", [("viscocity: 1\n", "viscocity"),
                                       ("params: {viscocity: 1}\n", "viscocity"),
                                       ("grid: {n: 300}\n", "'n'")])
def test_unknown_keys_are_named(extra, key):
    with pytest.raises(ConfigError, match=key):
        parse_config(MINIMAL + extra)


@pytest.mark.parametrize("text", [
    "right_state: {v: 2, u: 0, theta: 1}\n",
    MINIMAL + "strength: 0.5\n",
    MINIMAL + "perturbation: {shape: square}\n",
    MINIMAL + "perturbation: {shape: gaussian_bump, amplitude: -1}\n",
    MINIMAL + "perturbation: {fields: [rho]}\n",
    MINIMAL + "ctrl: {cfl: 1.5}\n",
    MINIMAL + "checks: [everything]\n",
    MINIMAL + "beta_units: furlongs\n",
    "theta_minus: 1.2\n",
    "- 1\n- 2\n",
    "right_state: {v: -1, u: 0, theta: 1}\ntheta_minus: 1.2\n",
    "right_state: [unclosed\n",
])
def test_invalid_documents(text):
    with pytest.raises(ConfigError):
        parse_config(text)


def test_unstable_cfl_needs_opt_in():
    cfg = parse_config(MINIMAL + "ctrl: {cfl: 1.5, allow_unstable: true}\n")
    assert cfg.ctrl.cfl == 1.5


def test_sweep_expansion():
    text = yaml.safe_dump({"base": {"name": "b", "right_state": {"v": 2, "u": 0, "theta": 1},
                                    "strength": 0.5},
                           "sweep": {"beta": [10, 20], "params.gamma": [1.4, 1.2]}})
    cfgs = parse_sweep(text)
    assert [c.beta for c in cfgs] == [10, 20]
    assert [c.params.gamma for c in cfgs] == [1.4, 1.2]
    assert cfgs[0].name == "b[beta=10,gamma=1.4]"
    assert parse_sweep(yaml.safe_dump({"sweep": {}})) == []
    assert len(parse_sweep(MINIMAL)) == 1
    with pytest.raises(ConfigError):
        parse_sweep(yaml.safe_dump({"sweep": {"beta": [1, 2], "t_end": [1]}}))


def test_output_dir_env(monkeypatch):
    monkeypatch.setenv("FBSHOCK_OUTPUT_DIR", "/tmp/somewhere")
    assert default_output_dir() == "/tmp/somewhere"
    monkeypatch.delenv("FBSHOCK_OUTPUT_DIR")
    assert default_output_dir() == "fbshock-out"


def test_resolution_rules():
    cfg = parse_config(MINIMAL)
    assert cfg.resolve_beta(0.5) == 40.0
    assert cfg.resolve_t_end(2.0, 0.5) == 50.0
    L = cfg.resolve_L(40.0, 2.0, 50.0, 0.5)
    assert L == max(40.0 + 120.0, 40.0 + 100.0 + 80.0)
    assert cfg.replace(t_end=5, t_end_units="crossing").resolve_t_end(2.0, 0.5) == 2.5


@settings(max_examples=50, deadline=None)
@given(N=st.integers(200, 10000), beta=st.floats(0, 100), amp=st.floats(0, 1),
       cfl=st.floats(0.01, 0.99), gamma=st.floats(1.01, 3.0))
def test_dict_round_trip(N, beta, amp, cfl, gamma):
    doc = {"right_state": {"v": 2.0, "u": 0.0, "theta": 1.0}, "theta_minus": 1.3,
           "params": {"gamma": gamma}, "beta": beta, "grid": {"N": N},
           "ctrl": {"cfl": cfl}, "perturbation": {"shape": "gaussian_bump", "amplitude": amp}}
    cfg = config_from_dict(doc)
    again = config_from_dict(yaml.safe_load(yaml.safe_dump(cfg.to_dict())))
    assert again == cfg
