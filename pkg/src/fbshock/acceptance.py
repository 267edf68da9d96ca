"""Built-in acceptance suite: eleven criteria with fixed configurations and tolerances.

Each ``criterion_<n>`` returns a list of :class:`~fbshock.harness.Verdict`.
The stability run shared by criteria 7, 8, 9 and 11 is computed once per process.
"""
from __future__ import annotations

import functools
import time

import numpy as np

from . import harness as hn
from .config import parse_config
from .gas import GasParams, ThermoState
from .harness import Verdict, _v
from .hugoniot import check_entropy, rh_residual, shock_speed_formula, solve_left_state
from .profile import compute_profile, decay_fit
from .shift import compute_alpha, dI_dalpha
from .solver import init_state

STABILITY = """
name: stability
right_state: {v: 2, u: 0, theta: 1}
strength: 0.5
beta: 20
t_end: 50
perturbation: {shape: gaussian_bump, amplitude: 0.01, width: 1.0}
grid: {N: 2000}
"""

TRAVELING_WAVE = """
name: traveling-wave
right_state: {v: 2, u: 0, theta: 1}
strength: 0.5
grid: {N: 4000}
t_end: 5
t_end_units: crossing
"""

RELAXATION = """
name: relaxation
right_state: {v: 2, u: 0, theta: 1}
strength: 0.5
perturbation: {shape: gaussian_bump, amplitude: 0.05, amplitude_units: absolute,
               center: 0.0, width: 0.5, fields: [v]}
t_end: 20
t_end_units: absolute
observe_every: 20
"""

BUILTIN = {"stability": STABILITY, "traveling-wave": TRAVELING_WAVE, "relaxation": RELAXATION}

RANDOM_BOX = {"gamma": (1.4, 5.0 / 3.0), "v_plus": (0.5, 4.0), "theta_plus": (0.5, 2.0),
              "ratio": (1.0, 2.0), "u_plus": (-1.0, 1.0)}


def random_shocks(n: int = 20, seed: int = 0):
    """``n`` admissible shocks drawn from :data:`RANDOM_BOX`."""
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(n):
        P = GasParams(gamma=float(rng.choice(RANDOM_BOX["gamma"])))
        right = ThermoState(v=float(rng.uniform(*RANDOM_BOX["v_plus"])),
                            u=float(rng.uniform(*RANDOM_BOX["u_plus"])),
                            theta=float(rng.uniform(*RANDOM_BOX["theta_plus"])))
        ratio = 2.0 - float(rng.uniform(0.0, 1.0))  # in (1, 2]
        out.append((P, right, ratio * right.theta))
    return out


def _timed(fn):
    @functools.wraps(fn)
    def wrapper(*a, **kw):
        t0 = time.perf_counter()
        verdicts = fn(*a, **kw)
        dt = time.perf_counter() - t0
        return [Verdict(v.name, v.criterion, v.passed, v.value, v.threshold,
                        (v.detail + "; " if v.detail else "") + f"runtime={dt:.2f}s")
                for v in verdicts]
    return wrapper


@functools.lru_cache(maxsize=None)
def experiment(name: str) -> hn.Experiment:
    """Prepared and simulated built-in experiment (cached)."""
    return hn.simulate(hn.prepare(parse_config(BUILTIN[name])))


@_timed
def criterion_1(seed: int = 0):
    worst, lax = 0.0, True
    for P, right, tm in random_shocks(20, seed):
        sh = solve_left_state(right, tm, P)
        worst = max(worst, *(abs(r) for r in rh_residual(sh, P)))
        lax &= check_entropy(sh, P)
    return [_v("rh_residual_random", 1, worst, 1e-10, passed=worst <= 1e-10 and lax,
               detail=f"lax={lax}")]


@_timed
def criterion_2(seed: int = 0):
    worst = 0.0
    for P, right, tm in random_shocks(20, seed):
        sh = solve_left_state(right, tm, P)
        worst = max(worst, abs(shock_speed_formula(sh, P) - sh.s ** 2) / sh.s ** 2)
    return [_v("shock_speed_identity_random", 2, worst, 1e-10)]


PROFILE_CASES = (
    (1.4, (2.0, 0.0, 1.0), 1.125),
    (5.0 / 3.0, (2.0, 0.0, 1.0), 1.2),
    (1.4, (1.0, 0.5, 1.5), 2.4),
)


@_timed
def criterion_3():
    out = []
    for g, rs, tm in PROFILE_CASES:
        P = GasParams(gamma=g)
        t0 = time.perf_counter()
        pr = compute_profile(solve_left_state(ThermoState(*rs), tm, P), P)
        elapsed = time.perf_counter() - t0
        fit = decay_fit(pr)
        mono = bool(np.all(np.diff(pr.V) > 0) and np.all(np.diff(pr.Theta) < 0))
        err = max(abs(fit.rate_left - pr.left_rate) / pr.left_rate,
                  abs(fit.rate_right - pr.right_rate) / pr.right_rate)
        tag = f"gamma={g:.4g},theta-={tm}"
        out += [_v(f"profile_endpoint_tol[{tag}]", 3, pr.endpoint_tol, 1e-8),
                _v(f"profile_monotone[{tag}]", 3, 0.0 if mono else 1.0, 0.0),
                _v(f"profile_tail_rate[{tag}]", 3, err, 0.05),
                _v(f"profile_runtime[{tag}]", 3, elapsed, 5.0)]
    return out


@_timed
def criterion_4():
    cfg = parse_config(STABILITY)
    ex = hn.prepare(cfg)
    sh = ex.shock
    target = sh.left.u - sh.right.u
    worst = max(abs(dI_dalpha(a, ex.state0.x, ex.state0.u, ex.profile, ex.beta) - target)
                for a in np.linspace(-1.0, 1.0, 9)) / abs(target)
    return [_v("shift_derivative", 4, worst, 1e-6)]


@_timed
def criterion_5():
    return hn.check_traveling_wave(hn.prepare(parse_config(TRAVELING_WAVE)))


@_timed
def criterion_6():
    return hn.check_relaxation(experiment("relaxation"))


@_timed
def criterion_7():
    return hn.check_momentum(experiment("stability"))


@_timed
def criterion_8():
    ex = experiment("stability")
    sup = ex.series["sup_norm"]
    return [_v("sup_norm_decay", 8, sup[-1] / sup[0], 0.2,
               detail=f"t_end={ex.t_end:.4g} N={ex.config.grid.N}")]


@_timed
def criterion_9():
    ex = experiment("stability")
    return hn.check_psi(ex) + hn.check_wrong_shift(ex)


def alpha_sweep(multiples=(10.0, 20.0, 40.0), perturbed: bool = False):
    """``|alpha|`` for offsets ``beta = m/(c2 d)``; optionally with the stability bump."""
    cfg = parse_config(STABILITY)
    if not perturbed:
        cfg = cfg.replace(perturbation=type(cfg.perturbation)())
    vals = []
    for m in multiples:
        ex = hn.prepare(cfg.replace(beta=m, t_end=0.0))
        vals.append(abs(ex.shift.alpha))
    return vals


@_timed
def criterion_10():
    out = []
    for perturbed in (False, True):
        a = alpha_sweep(perturbed=perturbed)
        ok = all(a[i] > a[i + 1] for i in range(len(a) - 1))
        steps = [a[i] - a[i + 1] for i in range(len(a) - 1)]
        out.append(_v("alpha_decreasing" + ("_perturbed" if perturbed else ""), 10,
                      min(steps), 0.0, passed=ok,
                      detail="|alpha|=" + ",".join(f"{x:.6e}" for x in a)))
    return out


@_timed
def criterion_11():
    return hn.check_e1(experiment("stability"))


CRITERIA = {i: globals()[f"criterion_{i}"] for i in range(1, 12)}


def run_all(selected=None):
    """Evaluate the selected criteria (all by default) and return the verdicts."""
    out = []
    for i in (selected or sorted(CRITERIA)):
        out.extend(CRITERIA[i]())
    return out
