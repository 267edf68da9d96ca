"""Free-boundary Lagrangian Navier-Stokes on a truncated half-line.

Unknowns ``(v, u, theta)`` live on a uniform collocated grid ``x_i = i dx``. The energy
equation is advanced in temperature form,

    cv theta_t = -p u_x + (kappa theta_x / v)_x + mu u_x^2 / v,

with second-order central differences, midpoint fluxes (arithmetic-mean ``v``) and
Heun's method in time. At ``x = 0`` the stress condition ``p - mu u_x / v = p0``
fixes ``u_x`` and the temperature is pinned to ``theta-``; the far node is held at
the right state.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable, Sequence

import numpy as np

from . import kernels
from .errors import BlowUp, ConfigError
from .gas import GasParams, ThermoState
from .profile import ShockProfile, decay_fit, sample_profile


@dataclass(frozen=True)
class StepControl:
    cfl: float = 0.4
    dt_max: float = math.inf
    positivity_floor: float = 1e-8
    allow_unstable: bool = False

    def __post_init__(self):
        if not self.cfl > 0.0:
            raise ConfigError(f"cfl must be positive, got {self.cfl}")
        if self.cfl >= 1.0 and not self.allow_unstable:
            raise ConfigError(f"cfl must be below 1, got {self.cfl} (set allow_unstable to force)")
        if not self.dt_max > 0.0:
            raise ConfigError("dt_max must be positive")


@dataclass
class SimState:
    x: np.ndarray
    v: np.ndarray
    u: np.ndarray
    theta: np.ndarray
    t: float
    params: GasParams
    p0: float
    theta_minus: float
    far: ThermoState
    steps: int = 0

    @property
    def dx(self) -> float:
        return float(self.x[1] - self.x[0])

    @property
    def N(self) -> int:
        return self.x.size - 1

    def copy(self) -> "SimState":
        return replace(self, v=self.v.copy(), u=self.u.copy(), theta=self.theta.copy())

    def pressure(self) -> np.ndarray:
        return self.params.R * self.theta / self.v


def default_length(profile: ShockProfile, beta: float, factor: float = 60.0) -> float:
    """Domain length ``beta + factor / (c2_hat d)``."""
    fit = decay_fit(profile)
    return beta + factor / (fit.c2_hat * profile.shock.d)


def init_state(profile: ShockProfile, beta: float, N: int = 2000, L: float | None = None,
               perturbation: Sequence[np.ndarray] | None = None) -> SimState:
    """Shifted profile ``(V, U, Theta)(x - beta)`` plus an optional perturbation triple.

    Raises
    ------
    ConfigError
        If ``L`` is too short for the profile tail, the perturbation does not
        vanish at the far end, or positivity fails after superposition.
    """
    sh, params = profile.shock, profile.params
    rate = decay_fit(profile).c2_hat * sh.d
    if L is None:
        L = beta + 60.0 / rate
    if L < beta + 40.0 / rate - 1e-12:
        raise ConfigError(f"L={L:.6g} shorter than beta + 40/(c2 d) = {beta + 40.0 / rate:.6g}")
    x = np.linspace(0.0, L, N + 1)
    V, U, T = sample_profile(profile, x - beta)
    v, u, th = V.copy(), U.copy(), T.copy()
    if perturbation is not None:
        dv, du, dth = (np.broadcast_to(np.asarray(f, dtype=float), x.shape) for f in perturbation)
        far = max(abs(dv[-1]), abs(du[-1]), abs(dth[-1]))
        if far > 1e-12:
            raise ConfigError(f"perturbation is {far:.3e} at x=L; it must decay before the far end")
        v += dv
        u += du
        th += dth
    th[0] = sh.left.theta
    v[-1], u[-1], th[-1] = sh.right.v, sh.right.u, sh.right.theta
    if np.any(v <= 0.0) or np.any(th <= 0.0):
        raise ConfigError("positivity violated after adding the perturbation")
    return SimState(x=x, v=v, u=u, theta=th, t=0.0, params=params, p0=sh.p_minus,
                    theta_minus=sh.left.theta, far=sh.right)


def boundary_closure(state: SimState):
    """Boundary gradient and ghost values at ``x = 0``.

    Returns ``(u_x(0), u_ghost, v_ghost)`` where ``u_x(0) = (p(v0, theta0) - p0) v0 / mu``,
    ``u_ghost = u_1 - 2 dx u_x(0)`` and ``v_ghost`` is the linear extrapolant.
    """
    P = state.params
    v0 = state.v[0]
    ux0 = (P.R * state.theta[0] / v0 - state.p0) * v0 / P.mu
    return ux0, state.u[1] - 2.0 * state.dx * ux0, 2.0 * v0 - state.v[1]


def rhs(state: SimState):
    """Semi-discrete time derivatives ``(v_t, u_t, theta_t)`` at every node."""
    P = state.params
    out = [np.empty_like(state.v) for _ in range(3)]
    kernels.rhs(state.v, state.u, state.theta, *out, state.dx, P.gamma, P.R, P.mu, P.kappa,
                state.p0, state.theta_minus)
    return tuple(out)


def stable_dt(state: SimState, ctrl: StepControl) -> float:
    """``cfl * min(dx / max lambda3, dx^2 min v / (2 max(mu, kappa (gamma-1) / R)))``."""
    P = state.params
    return min(kernels.stable_dt(state.v, state.theta, state.dx, P.gamma, P.R, P.mu, P.kappa,
                                 ctrl.cfl), ctrl.dt_max)


def _advance(state: SimState, t_end: float, max_steps: int, ctrl: StepControl) -> int:
    P = state.params
    t, n, status, node = kernels.advance(
        state.v, state.u, state.theta, float(state.t), float(t_end), int(max_steps),
        ctrl.cfl, ctrl.dt_max, ctrl.positivity_floor, state.dx,
        P.gamma, P.R, P.mu, P.kappa, state.p0, state.theta_minus,
    )
    state.t = t
    state.steps += n
    if status == kernels.BLOWUP:
        raise BlowUp("blow-up/instability: positivity floor crossed or non-finite value",
                     node=int(node), time=float(t))
    return n


def step(state: SimState, ctrl: StepControl = StepControl()) -> SimState:
    """One Heun step; returns a new state and leaves ``state`` untouched."""
    new = state.copy()
    _advance(new, math.inf, 1, ctrl)
    return new


def volume_flux(state: SimState) -> float:
    """Net boundary flux that the discrete volume ``dx * sum(v[:-1])`` obeys exactly.

    The central-difference update telescopes to ``(u_N + u_{N-1})/2 - (u_0 + u_ghost)/2``.
    """
    _, ug, _ = boundary_closure(state)
    return 0.5 * (state.u[-1] + state.u[-2]) - 0.5 * (state.u[0] + ug)


def discrete_volume(state: SimState) -> float:
    return state.dx * float(np.sum(state.v[:-1]))


@dataclass
class RunResult:
    """Final state plus one merged record per observation."""

    state: SimState
    records: list = field(default_factory=list)

    @property
    def times(self):
        return [r["t"] for r in self.records]


def run(state: SimState, t_end: float, ctrl: StepControl = StepControl(),
        observers: Sequence[Callable[[SimState], dict]] = (), every: int = 100) -> RunResult:
    """Advance to ``t_end``, calling each observer every ``every`` steps and at both ends.

    Observers receive a read-only copy of the state and return a dict; the dicts
    from one observation are merged into a single record with key ``t``.
    """
    if t_end < state.t:
        raise ConfigError(f"t_end={t_end} precedes the current time {state.t}")
    if every < 1:
        raise ConfigError("observation cadence must be at least one step")
    work = state.copy()
    result = RunResult(state=work)

    def observe():
        snap = work.copy()
        snap.v.flags.writeable = snap.u.flags.writeable = snap.theta.flags.writeable = False
        rec = {"t": snap.t}
        for obs in observers:
            rec.update(obs(snap))
        result.records.append(rec)

    observe()
    while work.t < t_end:
        _advance(work, t_end, every, ctrl)
        observe()
    return result
