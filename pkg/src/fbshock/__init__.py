"""Viscous heat-conducting shock profiles with a free boundary.

Compute Rankine-Hugoniot states and viscous shock profiles for a perfect gas,
find the profile shift that matches an initial perturbation, and simulate the
free-boundary problem to check the profile's stability numerically.
"""
from .gas import GasParams, ThermoState, pressure, internal_energy, lambda3
from .hugoniot import ShockData, solve_left_state, theta_minus_for_strength
from .profile import ShockProfile, compute_profile, decay_fit, sample_profile
from .shift import ShiftResult, compute_alpha, boundary_A
from .solver import SimState, StepControl, init_state, run, step
from .kernels import BACKEND

__all__ = [
    "GasParams", "ThermoState", "pressure", "internal_energy", "lambda3",
    "ShockData", "solve_left_state", "theta_minus_for_strength",
    "ShockProfile", "compute_profile", "decay_fit", "sample_profile",
    "ShiftResult", "compute_alpha", "boundary_A",
    "SimState", "StepControl", "init_state", "run", "step", "BACKEND",
]
__version__ = "0.1.0"
