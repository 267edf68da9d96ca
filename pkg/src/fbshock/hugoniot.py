"""3-shock end states from the right state and the left temperature.

Given ``(v+, u+, theta+)`` and ``theta-``, the mass and momentum jump relations
eliminate ``s`` and ``u-``; the energy relation then becomes the Hugoniot curve

    e+ - e- + (p+ + p-) (v+ - v-) / 2 = 0,

which for a perfect gas is a quadratic in ``v-`` with a negative root product,
so exactly one positive root exists.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import AmbiguousShock, DomainError, NoAdmissibleShock, NumericError
from .gas import GasParams, ThermoState, internal_energy, lambda3, pressure

RH_TOL = 1e-10


@dataclass(frozen=True)
class ShockData:
    """End states, speed and the integration constants of the profile equations."""

    left: ThermoState
    right: ThermoState
    s: float
    a: float
    b1: float
    b2: float
    d: float
    d1: float
    d2: float
    p_minus: float
    p_plus: float

    @classmethod
    def from_states(cls, left: ThermoState, right: ThermoState, s: float, params: GasParams):
        """Build the record from raw states and speed; constants use the right state."""
        pp = pressure(right, params)
        pm = pressure(left, params)
        ep = internal_energy(right.theta, params)
        d = right.v - left.v
        d2 = (params.gamma - 1.0) * d / (2.0 * right.v)
        d1 = d2 / (1.0 + d2)
        return cls(
            left=left,
            right=right,
            s=s,
            a=-(s * right.v + right.u),
            b1=pp + s * s * right.v,
            b2=ep + pp * right.v + 0.5 * s * s * right.v ** 2,
            d=d,
            d1=d1,
            d2=d2,
            p_minus=pm,
            p_plus=pp,
        )

    @property
    def p0(self) -> float:
        """Boundary pressure matched to the left state."""
        return self.p_minus

    def constants(self, side: str, params: GasParams):
        """Recompute ``(a, b1, b2)`` from one side (``"+"`` or ``"-"``)."""
        st = self.right if side == "+" else self.left
        p = pressure(st, params)
        e = internal_energy(st.theta, params)
        s = self.s
        return (-(s * st.v + st.u), p + s * s * st.v, e + p * st.v + 0.5 * s * s * st.v ** 2)

    def as_dict(self) -> dict:
        return {k: float(v) for k, v in {
            "v_minus": self.left.v, "u_minus": self.left.u, "theta_minus": self.left.theta,
            "v_plus": self.right.v, "u_plus": self.right.u, "theta_plus": self.right.theta,
            "s": self.s, "a": self.a, "b1": self.b1, "b2": self.b2,
            "d": self.d, "d1": self.d1, "d2": self.d2,
            "p_minus": self.p_minus, "p_plus": self.p_plus,
        }.items()}


def _hugoniot_roots(right: ThermoState, theta_minus: float, gamma: float) -> np.ndarray:
    # theta+ x^2 + v+ (theta- - theta+) (g+1)/(g-1) x - theta- v+^2 = 0, with x = v-
    tp, vp = right.theta, right.v
    B = (theta_minus - tp) * (gamma + 1.0) / (gamma - 1.0)
    disc = math.sqrt(B * B + 4.0 * tp * theta_minus)
    # cancellation-free pair
    pos = 2.0 * theta_minus * vp / (B + disc) if B >= 0 else vp * (disc - B) / (2.0 * tp)
    neg = -theta_minus * vp * vp / (tp * pos)
    return np.array([pos, neg])


def solve_left_state(right: ThermoState, theta_minus: float, params: GasParams) -> ShockData:
    """Find ``(v-, u-)`` on the 3-shock curve through ``right`` with temperature ``theta_minus``.

    Raises
    ------
    NoAdmissibleShock
        If ``theta_minus <= right.theta`` (no compressive shock).
    NumericError
        If the constructed states miss the jump relations by more than ``RH_TOL``.
    """
    if not theta_minus > 0.0:
        raise DomainError(f"theta_minus must be positive, got {theta_minus}")
    if not theta_minus > right.theta:
        raise NoAdmissibleShock(
            f"no admissible 3-shock: theta_minus={theta_minus} must exceed theta_plus={right.theta}"
        )
    pp = pressure(right, params)
    candidates = []
    for vm in _hugoniot_roots(right, theta_minus, params.gamma):
        if not 0.0 < vm < right.v:
            continue
        pm = params.R * theta_minus / vm
        s = math.sqrt((pm - pp) / (right.v - vm))
        left = ThermoState(vm, right.u + s * (right.v - vm), theta_minus)
        data = ShockData.from_states(left, right, s, params)
        if check_entropy(data, params):
            candidates.append(data)
    if not candidates:
        raise NoAdmissibleShock("no admissible 3-shock: no root in (0, v+) passes the Lax test")
    if len(candidates) > 1:
        raise AmbiguousShock(f"{len(candidates)} left states satisfy the Lax condition")
    data = candidates[0]
    res = rh_residual(data, params)
    if max(abs(r) for r in res) > RH_TOL:
        raise NumericError(f"jump relations not met: residuals={res}")
    return data


def rh_residual(data: ShockData, params: GasParams) -> tuple[float, float, float]:
    """Mass, momentum and energy jump residuals."""
    L, Rt, s = data.left, data.right, data.s
    pm, pp = params.R * L.theta / L.v, params.R * Rt.theta / Rt.v
    em, ep = params.cv * L.theta, params.cv * Rt.theta
    r1 = -s * (Rt.v - L.v) - (Rt.u - L.u)
    r2 = -s * (Rt.u - L.u) + (pp - pm)
    r3 = -s * ((ep + 0.5 * Rt.u ** 2) - (em + 0.5 * L.u ** 2)) + (pp * Rt.u - pm * L.u)
    return (r1, r2, r3)


def check_entropy(data: ShockData, params: GasParams) -> bool:
    """Lax condition ``0 < lambda3(right) < s < lambda3(left)``."""
    return 0.0 < lambda3(data.right, params) < data.s < lambda3(data.left, params)


def shock_speed_formula(data: ShockData, params: GasParams) -> float:
    """Squared speed ``gamma R theta- (1 - d1) / (v+ v-)``."""
    return params.gamma * params.R * data.left.theta * (1.0 - data.d1) / (data.right.v * data.left.v)


def theta_minus_for_strength(right: ThermoState, d: float, params: GasParams) -> float:
    """Left temperature whose 3-shock has strength ``v+ - v- = d``.

    The Hugoniot relation is linear in ``theta-`` once ``v-`` is fixed.
    """
    g, vp, tp = params.gamma, right.v, right.theta
    x = vp - d
    if not (0.0 < d and x > vp * (g - 1.0) / (g + 1.0)):
        raise NoAdmissibleShock(
            f"strength d={d} outside (0, {vp * 2.0 / (g + 1.0):.6g}) for v+={vp}, gamma={g}"
        )
    num = tp * x * (1.0 / (g - 1.0) + (vp - x) / (2.0 * vp))
    den = x / (g - 1.0) - (vp - x) / 2.0
    return num / den
