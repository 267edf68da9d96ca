"""Perfect-gas thermodynamics in Lagrangian variables (specific volume, velocity, temperature)."""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

from .errors import DomainError


@dataclass(frozen=True)
class GasParams:
    """Physical constants of a viscous, heat-conducting perfect gas.

    Defaults are the unit nondimensional set with ``gamma = 5/3``.
    """

    gamma: float = 5.0 / 3.0
    R: float = 1.0
    mu: float = 1.0
    kappa: float = 1.0

    def __post_init__(self):
        if not self.gamma > 1.0:
            raise DomainError(f"gamma must exceed 1, got {self.gamma}")
        for name in ("R", "mu", "kappa"):
            if not getattr(self, name) > 0.0:
                raise DomainError(f"{name} must be positive, got {getattr(self, name)}")

    @property
    def cv(self) -> float:
        """Heat capacity at constant volume, ``R / (gamma - 1)``."""
        return self.R / (self.gamma - 1.0)

    def warn_if_outside_theory(self) -> bool:
        """Warn when gamma lies outside (1, 2], the range covered by the stability theorem."""
        if self.gamma > 2.0:
            warnings.warn(
                f"gamma={self.gamma} is outside (1, 2]; stability is not guaranteed there",
                stacklevel=2,
            )
            return True
        return False


@dataclass(frozen=True)
class ThermoState:
    """Point state ``(v, u, theta)``; density is ``1 / v``."""

    v: float
    u: float
    theta: float

    def __post_init__(self):
        for name in ("v", "u", "theta"):
            object.__setattr__(self, name, float(getattr(self, name)))
        _check_state(self.v, self.theta)

    @property
    def rho(self) -> float:
        return 1.0 / self.v


def _check_state(v, theta):
    if not (v > 0.0 and math.isfinite(v)):
        raise DomainError(f"specific volume must be positive and finite, got {v}")
    if not (theta > 0.0 and math.isfinite(theta)):
        raise DomainError(f"temperature must be positive and finite, got {theta}")


def pressure(state: ThermoState, params: GasParams) -> float:
    """Return ``R * theta / v``."""
    _check_state(state.v, state.theta)
    return params.R * state.theta / state.v


def internal_energy(theta: float, params: GasParams) -> float:
    """Return ``R * theta / (gamma - 1)``; the additive constant is fixed to zero."""
    if not theta > 0.0:
        raise DomainError(f"temperature must be positive, got {theta}")
    return params.cv * theta


def lambda3(state: ThermoState, params: GasParams) -> float:
    """Largest characteristic speed in mass coordinates, ``sqrt(gamma R theta) / v``."""
    _check_state(state.v, state.theta)
    return math.sqrt(params.gamma * params.R * state.theta) / state.v
