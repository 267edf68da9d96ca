"""Perturbation fields, anti-derivatives, identities and the weighted energy ``E1``.

Everything here is evaluated on snapshots; the profile is always sampled at
``xi = x - s t + alpha - beta``.
"""
from __future__ import annotations

import csv
import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import cumulative_trapezoid

from .errors import FBShockError
from .gas import GasParams
from .hugoniot import ShockData
from .profile import ShockProfile, sample_profile
from .shift import boundary_A
from .solver import SimState

TRUNC_WARN = 1e-10
TRUNC_ERROR = 1e-6

CSV_COLUMNS = ("t", "sup_norm", "l2_phi", "l2_psi", "l2_w", "E1", "v0", "u0", "Psi0",
               "residual_momentum")


class TruncationError(FBShockError):
    """Perturbation still significant at the far end of the grid."""


def _trapz(y, x):
    return float(np.trapezoid(y, x))


@dataclass
class PerturbationFields:
    x: np.ndarray
    t: float
    phi: np.ndarray
    psi: np.ndarray
    w: np.ndarray
    V: np.ndarray
    U: np.ndarray
    Theta: np.ndarray

    @property
    def far_value(self) -> float:
        return float(max(abs(self.phi[-1]), abs(self.psi[-1]), abs(self.w[-1])))

    def sup_norm(self) -> float:
        return float(max(np.abs(self.phi).max(), np.abs(self.psi).max(), np.abs(self.w).max()))


def perturbation(state: SimState, profile: ShockProfile, alpha: float, beta: float) -> PerturbationFields:
    """Subtract the translated profile from the simulated fields."""
    xi = state.x - profile.shock.s * state.t + alpha - beta
    V, U, T = sample_profile(profile, xi)
    return PerturbationFields(x=state.x, t=state.t, phi=state.v - V, psi=state.u - U,
                              w=state.theta - T, V=V, U=U, Theta=T)


@dataclass
class AntiDerivatives:
    x: np.ndarray
    Phi: np.ndarray
    Psi: np.ndarray
    W: np.ndarray
    What: np.ndarray
    V: np.ndarray
    U: np.ndarray


def _tail_integral(f, x):
    # -int_x^L f dy with zero value at the far end
    c = cumulative_trapezoid(f, x, initial=0.0)
    return c - c[-1]


def antiderivatives(fields: PerturbationFields, state: SimState, profile: ShockProfile) -> AntiDerivatives:
    """Right-to-left cumulative trapezoid of ``(phi, psi)`` and of the total-energy excess."""
    far = fields.far_value
    if far > TRUNC_ERROR:
        raise TruncationError(f"perturbation {far:.3e} at the far end exceeds {TRUNC_ERROR}")
    if far > TRUNC_WARN:
        warnings.warn(f"perturbation {far:.3e} at the far end; anti-derivatives are truncated",
                      stacklevel=2)
    P = state.params
    x = fields.x
    Phi = _tail_integral(fields.phi, x)
    Psi = _tail_integral(fields.psi, x)
    energy = (P.cv * state.theta + 0.5 * state.u ** 2) - (P.cv * fields.Theta + 0.5 * fields.U ** 2)
    W = _tail_integral(energy, x)
    What = (P.gamma - 1.0) / P.R * (W - fields.U * Psi)
    return AntiDerivatives(x=x, Phi=Phi, Psi=Psi, W=W, What=What, V=fields.V, U=fields.U)


def k_weight(V, shock: ShockData):
    """``k(V) = 1 / (b1 - s^2 V)``."""
    return 1.0 / (shock.b1 - shock.s ** 2 * np.asarray(V))


def e1_density(anti: AntiDerivatives, shock: ShockData, params: GasParams) -> np.ndarray:
    k = k_weight(anti.V, shock)
    return 0.5 * (anti.Phi ** 2 + k * anti.V * anti.Psi ** 2
                  + params.R ** 2 / (params.gamma - 1.0) * k ** 2 * anti.What ** 2)


def lyapunov_E1(anti: AntiDerivatives, profile: ShockProfile, shock: ShockData | None = None) -> float:
    """Trapezoid integral of ``(Phi^2 + k V Psi^2 + R^2/(gamma-1) k^2 What^2) / 2``."""
    shock = shock or profile.shock
    return _trapz(e1_density(anti, shock, profile.params), anti.x)


def pressure_bounds(shock: ShockData) -> tuple[float, float]:
    """Range of ``b1 - s^2 V`` for ``V`` between the end states, as ``(low, high)``.

    ``b1 - s^2 V`` decreases in ``V``, so the low end is ``p+`` and the high end ``p-``.
    """
    return min(shock.p_plus, shock.p_minus), max(shock.p_plus, shock.p_minus)


def e1_bounds(shock: ShockData, params: GasParams) -> tuple[float, float]:
    """Constants ``c, C`` with ``c q <= E1 density <= C q``, ``q = Phi^2 + Psi^2 + What^2/(gamma-1)``."""
    plo, phi_ = pressure_bounds(shock)
    kmin, kmax = 1.0 / phi_, 1.0 / plo
    vmin, vmax = sorted((shock.left.v, shock.right.v))
    R2 = params.R ** 2
    c = 0.5 * min(1.0, kmin * vmin, R2 * kmin ** 2)
    C = 0.5 * max(1.0, kmax * vmax, R2 * kmax ** 2)
    return c, C


def e1_equivalence(anti: AntiDerivatives, state: SimState, shock: ShockData, params: GasParams):
    """Check the two-sided bound at nodes with ``v`` between the end states.

    Returns ``(ok, n_checked, n_outside)``.
    """
    c, C = e1_bounds(shock, params)
    dens = e1_density(anti, shock, params)
    q = anti.Phi ** 2 + anti.Psi ** 2 + anti.What ** 2 / (params.gamma - 1.0)
    lo, hi = sorted((shock.left.v, shock.right.v))
    inside = (state.v >= lo) & (state.v <= hi)
    slack = 1e-14 * np.maximum(q, 1e-300)
    ok = bool(np.all((c * q[inside] <= dens[inside] + slack[inside])
                     & (dens[inside] <= C * q[inside] + slack[inside])))
    return ok, int(inside.sum()), int((~inside).sum())


def e1_boundary_flux(anti: AntiDerivatives, fields: PerturbationFields, profile: ShockProfile) -> float:
    """Boundary flux of the ``E1`` balance at ``x = 0``.

    ``mu k Psi Psi_x - Phi Psi - R kappa k^2 / V (What_x + (gamma-1)/R U_x Psi) What + R k What Psi``
    """
    P, sh = profile.params, profile.shock
    dx = float(anti.x[1] - anti.x[0])
    k = float(k_weight(anti.V[0], sh))
    V0 = float(anti.V[0])
    What_x = (-3.0 * anti.What[0] + 4.0 * anti.What[1] - anti.What[2]) / (2.0 * dx)
    Ux = float(fields.U[1] - fields.U[0]) / dx if fields.U.size > 1 else 0.0
    Psi0, Phi0, W0 = anti.Psi[0], anti.Phi[0], anti.What[0]
    return float(P.mu * k * Psi0 * fields.psi[0] - Phi0 * Psi0
                 - P.R * P.kappa * k * k / V0 * (What_x + (P.gamma - 1.0) / P.R * Ux * Psi0) * W0
                 + P.R * k * W0 * Psi0)


def momentum_integral(fields: PerturbationFields) -> float:
    """``int_0^L (u - U) dx``."""
    return _trapz(fields.psi, fields.x)


def h1_surrogate(fields: PerturbationFields, anti: AntiDerivatives) -> float:
    """``||(Phi, Psi, W)|| + ||(phi, psi, W_x)||``, the discrete stand-in for the H^2 norm."""
    x = fields.x
    l2 = lambda f: math.sqrt(_trapz(f * f, x))  # noqa: E731
    Wx = np.gradient(anti.W, x)
    return (math.sqrt(l2(anti.Phi) ** 2 + l2(anti.Psi) ** 2 + l2(anti.W) ** 2)
            + math.sqrt(l2(fields.phi) ** 2 + l2(fields.psi) ** 2 + l2(Wx) ** 2))


@dataclass
class Monitor:
    """Observer computing one diagnostics row per snapshot.

    ``wrong_shift`` adds the momentum integral measured against the profile shifted
    by ``alpha + wrong_shift`` (column ``mom_wrong``).
    """

    profile: ShockProfile
    alpha: float
    beta: float
    wrong_shift: float = 1.0

    def __call__(self, state: SimState) -> dict:
        sh, P = self.profile.shock, self.profile.params
        f = perturbation(state, self.profile, self.alpha, self.beta)
        anti = antiderivatives(f, state, self.profile)
        E1 = lyapunov_E1(anti, self.profile)
        ok, n_in, n_out = e1_equivalence(anti, state, sh, P)
        x = f.x
        l2 = lambda g: math.sqrt(_trapz(g * g, x))  # noqa: E731
        fw = perturbation(state, self.profile, self.alpha + self.wrong_shift, self.beta)
        return {
            "sup_norm": f.sup_norm(),
            "l2_phi": l2(f.phi),
            "l2_psi": l2(f.psi),
            "l2_w": l2(f.w),
            "E1": E1,
            "v0": float(state.v[0]),
            "u0": float(state.u[0]),
            "Psi0": float(anti.Psi[0]),
            "mom": momentum_integral(f),
            "mom_wrong": momentum_integral(fw),
            "A": float(boundary_A(state.t, self.profile, self.alpha, self.beta)),
            "N_sur": h1_surrogate(f, anti),
            "flux0": e1_boundary_flux(anti, f, self.profile),
            "e1_equiv_ok": ok,
            "e1_nodes_outside": n_out,
            "far_value": f.far_value,
        }


@dataclass
class DiagnosticsSeries:
    """Column-oriented view of the monitor records."""

    columns: dict = field(default_factory=dict)

    @classmethod
    def from_records(cls, records) -> "DiagnosticsSeries":
        keys = list(records[0].keys()) if records else []
        return cls({k: np.array([r[k] for r in records]) for k in keys})

    def __getitem__(self, key):
        return self.columns[key]

    def __len__(self):
        return len(self.columns.get("t", ()))

    @property
    def times(self):
        return self.columns["t"]

    def with_column(self, key, values) -> "DiagnosticsSeries":
        cols = dict(self.columns)
        cols[key] = np.asarray(values)
        return DiagnosticsSeries(cols)

    def N_of_t(self):
        """Running supremum of the norm surrogate."""
        return np.maximum.accumulate(self.columns["N_sur"])

    def to_csv(self, path, columns=CSV_COLUMNS):
        with open(path, "w", newline="") as fh:
            wr = csv.writer(fh, lineterminator="\n")
            wr.writerow(columns)
            for i in range(len(self)):
                wr.writerow([repr(float(self.columns[c][i])) for c in columns])


def momentum_identity_residual(series: DiagnosticsSeries, profile: ShockProfile,
                               alpha: float, beta: float) -> np.ndarray:
    """``int (u - U) dx - [int (u0 - U) dx - int_0^t s (U(-s tau + alpha - beta) - u-) dtau]``.

    The initial integral is taken from the first record, which must be at ``t = 0``.
    """
    t = series.times
    s = profile.shock.s
    mom = series["mom"]
    flux = profile.velocity_primitive(alpha - beta) - profile.velocity_primitive(-s * t + alpha - beta)
    return mom - (mom[0] - flux)


@dataclass(frozen=True)
class RelaxationFit:
    slope: float
    intercept: float
    n_samples: int
    status: str = "ok"


def boundary_relaxation_check(times, v0, p0: float, mu: float, v_minus: float,
                              floor: float = 1e-11) -> RelaxationFit:
    """Fit ``log|v(0,t) - v-|`` linearly in ``t``; expected slope ``-p0/mu``.

    Returns ``status="already relaxed"`` when the deviation never rises above ``floor``.
    """
    times = np.asarray(times, dtype=float)
    dev = np.abs(np.asarray(v0, dtype=float) - v_minus)
    if times.size and times[-1] - times[0] < 3.0 * mu / p0:
        warnings.warn("observation window shorter than 3 mu/p0", stacklevel=2)
    keep = dev > floor
    if keep.sum() < 3:
        return RelaxationFit(math.nan, math.nan, int(keep.sum()), status="already relaxed")
    slope, intercept = np.polyfit(times[keep], np.log(dev[keep]), 1)
    return RelaxationFit(float(slope), float(intercept), int(keep.sum()))


def boundary_psi_check(series: DiagnosticsSeries, profile: ShockProfile, alpha: float,
                       beta: float) -> float:
    """``max_t |Psi(0, t) - A(t)|`` over the observation times."""
    A = boundary_A(series.times, profile, alpha, beta)
    return float(np.max(np.abs(series["Psi0"] - A)))


def e1_boundary_term(series: DiagnosticsSeries) -> np.ndarray:
    """Running ``int_0^t |boundary flux| dtau`` (trapezoid over observation times)."""
    return cumulative_trapezoid(np.abs(series["flux0"]), series.times, initial=0.0)
