import math
import os
import subprocess
import sys

import numpy as np
import pytest

from fbshock import _kernels_py, kernels
from fbshock.errors import BlowUp, ConfigError
from fbshock.gas import GasParams, ThermoState
from fbshock.profile import decay_fit, sample_profile
from fbshock.solver import (SimState, StepControl, default_length, discrete_volume, init_state,
                            rhs, run, step, volume_flux)


@pytest.fixture(scope="module")
def setup(profile):
    rate = decay_fit(profile).c2_hat * profile.shock.d
    beta = 20.0 / rate
    return beta, rate


def _bumped(profile, beta, N=400, amp=5e-3):
    L = default_length(profile, beta)
    x = np.linspace(0.0, L, N + 1)
    g = amp * np.exp(-0.5 * (x - beta) ** 2)
    return init_state(profile, beta, N=N, perturbation=(g, g, g))


def test_uniform_state_is_steady(air):
    st = ThermoState(1.5, 0.2, 1.125)
    N = 300
    x = np.linspace(0.0, 30.0, N + 1)
    p0 = air.R * st.theta / st.v
    state = SimState(x=x, v=np.full(N + 1, st.v), u=np.full(N + 1, st.u),
                     theta=np.full(N + 1, st.theta), t=0.0, params=air, p0=p0,
                     theta_minus=st.theta, far=st)
    for r in rhs(state):
        assert np.max(np.abs(r)) < 1e-13
    out = run(state, 5.0).state
    assert np.max(np.abs(out.v - st.v)) < 1e-12
    assert np.max(np.abs(out.u - st.u)) < 1e-12


def test_step_control_validation():
    with pytest.raises(ConfigError):
        StepControl(cfl=1.0)
    with pytest.raises(ConfigError):
        StepControl(cfl=0.0)
    assert StepControl(cfl=5.0, allow_unstable=True).cfl == 5.0


def test_unstable_cfl_blows_up(profile, setup):
    beta, _ = setup
    state = _bumped(profile, beta)
    with pytest.raises(BlowUp) as err:
        run(state, 50.0, StepControl(cfl=5.0, allow_unstable=True))
    assert 0 <= err.value.node <= state.N
    assert 0.0 < err.value.time < 50.0


def test_init_state_checks(profile, setup):
    beta, rate = setup
    with pytest.raises(ConfigError):
        init_state(profile, beta, N=400, L=beta + 10.0 / rate)
    L = default_length(profile, beta)
    x = np.linspace(0.0, L, 401)
    with pytest.raises(ConfigError):
        init_state(profile, beta, N=400, perturbation=(0 * x + 1e-3, 0 * x, 0 * x))
    with pytest.raises(ConfigError):
        bump = -10.0 * np.exp(-0.5 * (x - beta) ** 2)
        init_state(profile, beta, N=400, perturbation=(bump, 0 * x, 0 * x))


def test_initial_state_matches_profile(profile, setup):
    beta, _ = setup
    s = init_state(profile, beta, N=400)
    V, U, T = sample_profile(profile, s.x - beta)
    sh = profile.shock
    assert s.theta[0] == sh.left.theta
    assert (s.v[-1], s.u[-1], s.theta[-1]) == (sh.right.v, sh.right.u, sh.right.theta)
    assert np.max(np.abs(s.v - V)) < 1e-12


def test_volume_balance_is_exact(profile, setup):
    beta, _ = setup
    s = _bumped(profile, beta)
    dv, _, _ = rhs(s)
    assert s.dx * np.sum(dv[:-1]) == pytest.approx(volume_flux(s), abs=1e-13)
    # and over one explicit step the change matches the averaged flux
    nxt = step(s)
    dt = nxt.t - s.t
    flux = 0.5 * (volume_flux(s) + volume_flux(_euler(s, dt)))
    assert discrete_volume(nxt) - discrete_volume(s) == pytest.approx(dt * flux, abs=1e-12)


def _euler(s, dt):
    out = s.copy()
    dv, du, dth = rhs(s)
    out.v += dt * dv
    out.u += dt * du
    out.theta += dt * dth
    return out


def test_step_leaves_input_untouched(profile, setup):
    beta, _ = setup
    s = _bumped(profile, beta)
    before = (s.v.copy(), s.u.copy(), s.theta.copy(), s.t)
    nxt = step(s)
    assert np.array_equal(s.v, before[0]) and s.t == before[3]
    assert nxt.t > s.t and nxt.steps == s.steps + 1


def test_observer_cadence_and_snapshots(profile, setup):
    beta, _ = setup
    s = _bumped(profile, beta)
    seen = []

    def obs(state):
        assert not state.v.flags.writeable
        seen.append(state.steps)
        return {"steps": state.steps}

    res = run(s, 3.0, observers=[obs], every=7)
    steps = res.state.steps
    assert len(res.records) == 1 + math.ceil(steps / 7)
    assert seen[:3] == [0, 7, 14] and seen[-1] == steps
    assert res.times[0] == 0.0 and res.times[-1] == 3.0
    with pytest.raises(ConfigError):
        run(s, 1.0, every=0)


def test_boundary_relaxes_exponentially(profile, setup):
    beta, _ = setup
    s = init_state(profile, beta, N=400)
    vm, p0 = profile.shock.left.v, profile.shock.p0
    s.v[0] += 0.05
    res = run(s, 4.0, observers=[lambda st: {"v0": float(st.v[0])}], every=5)
    t = np.array(res.times)
    dev = np.array([r["v0"] for r in res.records]) - vm
    # the boundary ODE is linear, so the only error is Heun's O(dt^2) time error
    np.testing.assert_allclose(dev, 0.05 * np.exp(-p0 * t / profile.params.mu), rtol=5e-3)


def test_traveling_wave_second_order(profile, setup):
    beta, _ = setup
    errs = []
    for N in (300, 600):
        s = init_state(profile, beta, N=N)
        out = run(s, 2.0 / profile.shock.s).state
        V, U, T = sample_profile(profile, out.x - profile.shock.s * out.t - beta)
        errs.append(max(np.abs(out.v - V).max(), np.abs(out.u - U).max(),
                        np.abs(out.theta - T).max()))
    assert 3.0 <= errs[0] / errs[1] <= 5.0


@pytest.mark.skipif(kernels.BACKEND != "cython", reason="compiled backend not selected")
def test_backends_agree(profile, setup):
    from fbshock import _kernels
    beta, _ = setup
    s = _bumped(profile, beta)
    P = s.params
    args = (s.dx, P.gamma, P.R, P.mu, P.kappa, s.p0, s.theta_minus)
    outs = []
    for mod in (_kernels_py, _kernels):
        buf = [np.empty_like(s.v) for _ in range(3)]
        mod.rhs(s.v, s.u, s.theta, *buf, *args)
        v, u, th = s.v.copy(), s.u.copy(), s.theta.copy()
        t, n, status, node = mod.advance(v, u, th, 0.0, 2.0, 10 ** 6, 0.4, math.inf, 1e-8, *args)
        outs.append((buf, (v, u, th), t, n, status))
    (b1, f1, t1, n1, s1), (b2, f2, t2, n2, s2) = outs
    for a, b in zip(b1 + list(f1), b2 + list(f2)):
        np.testing.assert_allclose(a, b, rtol=1e-13, atol=1e-14)
    assert (t1, n1, s1) == (t2, n2, s2)
    assert _kernels.stable_dt(s.v, s.theta, *args[:5], 0.4) == pytest.approx(
        _kernels_py.stable_dt(s.v, s.theta, *args[:5], 0.4), rel=1e-14)


def test_pure_python_switch():
    env = dict(os.environ, FBSHOCK_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", "from fbshock import kernels; print(kernels.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"
