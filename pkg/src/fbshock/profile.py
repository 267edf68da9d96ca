"""Viscous shock profile as the heteroclinic orbit of the integrated traveling-wave ODE.

In the traveling coordinate ``xi = x - s t`` the profile satisfies

    V' = V / (s mu) * (b1 - s^2 V - R Theta / V)
    Theta' = s V / kappa * (b2 - b1^2 / (2 s^2) - cv Theta + s^2 (V - b1 / s^2)^2 / 2)
    U = -(s V + a)

The left state is a saddle and the right state a stable node, so the orbit is
traced by leaving ``(v-, theta-)`` along its unstable eigenvector.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp
from scipy.interpolate import CubicHermiteSpline
from scipy.optimize import brentq

from .errors import DomainError, FitError, OrbitEscape, SlowConvergence
from .gas import GasParams
from .hugoniot import ShockData

ODE_RTOL = 1e-10
ODE_ATOL = 1e-14
N_SAMPLES = 4001


def profile_rhs(V, Theta, shock: ShockData, params: GasParams):
    """Right-hand side ``(dV/dxi, dTheta/dxi)``; accepts scalars or arrays."""
    V = np.asarray(V, dtype=float)
    Theta = np.asarray(Theta, dtype=float)
    if np.any(V <= 0.0) or np.any(Theta <= 0.0):
        raise DomainError("profile_rhs needs V > 0 and Theta > 0")
    s, b1, b2 = shock.s, shock.b1, shock.b2
    dV = V / (s * params.mu) * (b1 - s * s * V - params.R * Theta / V)
    g = b2 - b1 * b1 / (2.0 * s * s) - params.cv * Theta + 0.5 * s * s * (V - b1 / (s * s)) ** 2
    dT = s * V / params.kappa * g
    if dV.ndim == 0:
        return float(dV), float(dT)
    return dV, dT


def jacobian(V: float, Theta: float, shock: ShockData, params: GasParams) -> np.ndarray:
    """Exact Jacobian of :func:`profile_rhs` at ``(V, Theta)``."""
    s, b1, b2 = shock.s, shock.b1, shock.b2
    R, mu, kappa, cv = params.R, params.mu, params.kappa, params.cv
    g = b2 - b1 * b1 / (2.0 * s * s) - cv * Theta + 0.5 * s * s * (V - b1 / (s * s)) ** 2
    return np.array([
        [(b1 - 2.0 * s * s * V) / (s * mu), -R / (s * mu)],
        [s / kappa * g + s * V / kappa * s * s * (V - b1 / (s * s)), -s * V * cv / kappa],
    ])


def eig2(J: np.ndarray):
    """Closed-form eigenpairs of a real 2x2 matrix with real spectrum.

    Returns eigenvalues in ascending order and unit eigenvectors as columns.
    """
    tr = J[0, 0] + J[1, 1]
    det = J[0, 0] * J[1, 1] - J[0, 1] * J[1, 0]
    disc = tr * tr / 4.0 - det
    if disc < 0.0:
        raise DomainError("complex eigenvalues: fixed point is a focus")
    root = math.sqrt(disc)
    # avoid cancellation in the smaller-magnitude eigenvalue
    big = tr / 2.0 + math.copysign(root, tr) if tr != 0.0 else root
    lams = sorted([big, det / big if big != 0.0 else -big])
    vecs = np.empty((2, 2))
    for k, lam in enumerate(lams):
        c1 = np.array([J[0, 1], lam - J[0, 0]])
        c2 = np.array([lam - J[1, 1], J[1, 0]])
        w = c1 if np.linalg.norm(c1) >= np.linalg.norm(c2) else c2
        vecs[:, k] = w / np.linalg.norm(w)
    return np.array(lams), vecs


def fixed_point_rates(shock: ShockData, params: GasParams):
    """Exponential tail rates predicted by linearisation.

    Returns ``(left_rate, right_rate)``: the positive eigenvalue at the left saddle and
    the magnitude of the slow (least negative) eigenvalue at the right node.
    """
    lam_l, _ = eig2(jacobian(shock.left.v, shock.left.theta, shock, params))
    lam_r, _ = eig2(jacobian(shock.right.v, shock.right.theta, shock, params))
    return float(lam_l[1]), float(-lam_r[1])


def _unstable_direction(shock, params):
    lams, vecs = eig2(jacobian(shock.left.v, shock.left.theta, shock, params))
    if not (lams[1] > 0.0 > lams[0]):
        raise OrbitEscape(f"left state is not a saddle: eigenvalues {lams}")
    w = vecs[:, 1]
    if w[0] < 0.0:
        w = -w
    return float(lams[1]), w


@dataclass(eq=False)
class ShockProfile:
    """Sampled profile on a uniform grid ``[-span, span]`` centred at the volume midpoint."""

    xi: np.ndarray
    V: np.ndarray
    U: np.ndarray
    Theta: np.ndarray
    shock: ShockData
    params: GasParams
    endpoint_tol: float
    centering: str = "V(0)=(v-+v+)/2"
    left_rate: float = field(default=0.0)
    right_rate: float = field(default=0.0)

    def __post_init__(self):
        dV, dT = profile_rhs(self.V, self.Theta, self.shock, self.params)
        self._V = CubicHermiteSpline(self.xi, self.V, dV)
        self._T = CubicHermiteSpline(self.xi, self.Theta, dT)
        self._Vint = self._V.antiderivative()

    @property
    def span(self) -> float:
        return float(self.xi[-1])

    @property
    def h(self) -> float:
        return float(self.xi[1] - self.xi[0])

    def _tails(self, xi):
        """Exponential continuation weights beyond either end of the grid."""
        L = self.span
        wl = np.exp(self.left_rate * (np.minimum(xi, -L) + L))
        wr = np.exp(-self.right_rate * (np.maximum(xi, L) - L))
        return wl, wr

    def evaluate(self, xi):
        """``(V, Theta)`` at ``xi``: Hermite inside, exponential decay to the end states outside."""
        xi = np.asarray(xi, dtype=float)
        sh, L = self.shock, self.span
        xc = np.clip(xi, -L, L)
        wl, wr = self._tails(xi)
        V = np.where(xi < -L, sh.left.v + (self.V[0] - sh.left.v) * wl,
                     np.where(xi > L, sh.right.v + (self.V[-1] - sh.right.v) * wr, self._V(xc)))
        T = np.where(xi < -L, sh.left.theta + (self.Theta[0] - sh.left.theta) * wl,
                     np.where(xi > L, sh.right.theta + (self.Theta[-1] - sh.right.theta) * wr,
                              self._T(xc)))
        return V, T

    def derivatives(self, xi):
        """``(V', Theta')`` consistent with :meth:`evaluate`."""
        xi = np.asarray(xi, dtype=float)
        sh, L = self.shock, self.span
        xc = np.clip(xi, -L, L)
        wl, wr = self._tails(xi)
        kl, kr = self.left_rate, -self.right_rate
        dV = np.where(xi < -L, kl * (self.V[0] - sh.left.v) * wl,
                      np.where(xi > L, kr * (self.V[-1] - sh.right.v) * wr, self._V(xc, 1)))
        dT = np.where(xi < -L, kl * (self.Theta[0] - sh.left.theta) * wl,
                      np.where(xi > L, kr * (self.Theta[-1] - sh.right.theta) * wr, self._T(xc, 1)))
        return dV, dT

    def volume_primitive(self, xi):
        """``int_{-inf}^{xi} (V - v-) dxi`` with exponential tails beyond the grid."""
        xi = np.asarray(xi, dtype=float)
        L = self.span
        vm, vp = self.shock.left.v, self.shock.right.v
        aL = self.V[0] - vm
        aR = self.V[-1] - vp
        base = aL / self.left_rate
        xc = np.clip(xi, -L, L)
        core = base + self._Vint(xc) - self._Vint(-L) - vm * (xc + L)
        left = aL * np.exp(self.left_rate * (np.minimum(xi, -L) + L)) / self.left_rate
        over = np.maximum(xi - L, 0.0)
        right = (vp - vm) * over + aR * (-np.expm1(-self.right_rate * over)) / self.right_rate
        out = np.where(xi < -L, left, core + right)
        return out if out.ndim else float(out)

    def velocity_primitive(self, xi):
        """``int_{-inf}^{xi} (U - u-) dxi``; equals ``-s`` times the volume primitive."""
        return -self.shock.s * self.volume_primitive(xi)


def _leg(y0, origin, shock, params, xi0, max_span, stop):
    """Integrate from ``y0`` at ``xi0`` carrying the offset from ``origin``.

    Carrying the offset from the fixed point that the leg approaches or leaves
    keeps the relative tolerance meaningful deep in that tail. ``stop`` is a
    terminal event in absolute variables ``(V, Theta)``.
    """
    vm, vp = shock.left.v, shock.right.v
    tm, tp = shock.left.theta, shock.right.theta
    ov, ot = origin
    tol = stop.tol

    def rhs(_, z):
        V, T = ov + z[0], ot + z[1]
        if V <= 0.0 or T <= 0.0:
            return np.array([np.nan, np.nan])
        return np.array(profile_rhs(V, T, shock, params))

    def done(_, z):
        return stop(ov + z[0], ot + z[1])

    done.terminal = True
    done.direction = stop.direction

    def escape(_, z):
        V, T = ov + z[0], ot + z[1]
        return min(V - vm, vp - V, T - tp, tm - T) + tol

    escape.terminal = True
    escape.direction = -1

    z0 = np.asarray(y0, dtype=float) - np.asarray(origin, dtype=float)
    sol = solve_ivp(rhs, (xi0, xi0 + max_span), z0, method="RK45", rtol=ODE_RTOL,
                    atol=ODE_ATOL, dense_output=True, events=[done, escape])
    if sol.t_events[1].size:
        raise OrbitEscape(f"orbit left the end-state rectangle at xi={sol.t_events[1][0]:.6g}")
    if not sol.success or not np.all(np.isfinite(sol.y)):
        raise OrbitEscape(f"integration failed: {sol.message}")
    if not sol.t_events[0].size:
        raise SlowConvergence(f"{stop.what} not reached within span {max_span}")
    return sol


class _Stop:
    def __init__(self, fn, direction, tol, what):
        self.fn, self.direction, self.tol, self.what = fn, direction, tol, what

    def __call__(self, V, T):
        return self.fn(V, T)


def compute_profile(shock: ShockData, params: GasParams, tol: float = 1e-8,
                    max_span: float = 1e4, n_samples: int = N_SAMPLES,
                    eps: float | None = None) -> ShockProfile:
    """Trace the heteroclinic orbit and resample it on a centred uniform grid.

    Parameters
    ----------
    tol : float
        Required distance ``|V - v±| + |Theta - theta±|`` at both grid ends.
    max_span : float
        Give up if the right state is not reached within this ``xi`` length.
    eps : float, optional
        Offset along the unstable eigenvector; defaults to ``1e-8 * d``.
    """
    lam_u, w = _unstable_direction(shock, params)
    if eps is None:
        eps = 1e-8 * shock.d
    fixed_l = np.array([shock.left.v, shock.left.theta])
    fixed_r = np.array([shock.right.v, shock.right.theta])
    y0 = fixed_l + eps * w
    vmid = 0.5 * (shock.left.v + shock.right.v)
    if y0[0] >= vmid:
        raise OrbitEscape("initial offset already beyond the volume midpoint")

    # leave the left state up to the centre, then approach the right state
    to_mid = _Stop(lambda V, T: V - vmid, 1, tol, "volume midpoint")
    first = _leg(y0, fixed_l, shock, params, 0.0, max_span, to_mid)
    xi_star = float(first.t_events[0][0])
    y_mid = fixed_l + first.y_events[0][0]
    arrive = _Stop(lambda V, T: abs(V - fixed_r[0]) + abs(T - fixed_r[1]) - 0.25 * tol, 0,
                   tol, "right fixed point")
    second = _leg(y_mid, fixed_r, shock, params, xi_star, max_span, arrive)
    xi_end = float(second.t_events[0][0])

    # left of the start point the orbit is the linear unstable manifold
    amp = eps * float(np.abs(w).sum())
    xi_left = min(0.0, math.log(0.5 * tol / amp) / lam_u) if amp > 0.5 * tol else 0.0
    span = max(xi_star - xi_left, xi_end - xi_star)
    if span > max_span:
        raise SlowConvergence(f"required span {span:.4g} exceeds {max_span}")

    xi = np.linspace(-span, span, n_samples)
    z = xi + xi_star
    Y = np.empty((2, n_samples))
    lin = z < 0.0
    Y[:, lin] = fixed_l[:, None] + eps * w[:, None] * np.exp(lam_u * z[lin])[None, :]
    left = (~lin) & (z <= xi_star)
    Y[:, left] = fixed_l[:, None] + first.sol(z[left])
    mid = (z > xi_star) & (z <= xi_end)
    Y[:, mid] = fixed_r[:, None] + second.sol(z[mid])
    tail = z > xi_end
    if tail.any():
        def rhs_off(_, q):
            return np.array(profile_rhs(fixed_r[0] + q[0], fixed_r[1] + q[1], shock, params))

        ext = solve_ivp(rhs_off, (xi_end, z[-1]), second.y[:, -1], method="RK45", rtol=ODE_RTOL,
                        atol=ODE_ATOL, dense_output=True)
        Y[:, tail] = fixed_r[:, None] + ext.sol(z[tail])

    V, Theta = Y
    lo = (V < shock.left.v - tol) | (V > shock.right.v + tol)
    lo |= (Theta < shock.right.theta - tol) | (Theta > shock.left.theta + tol)
    if lo.any():
        raise OrbitEscape("resampled orbit outside the end-state rectangle")
    err_l = abs(V[0] - fixed_l[0]) + abs(Theta[0] - fixed_l[1])
    err_r = abs(V[-1] - fixed_r[0]) + abs(Theta[-1] - fixed_r[1])
    left_rate, right_rate = fixed_point_rates(shock, params)
    return ShockProfile(
        xi=xi, V=V, U=-(shock.s * V + shock.a), Theta=Theta, shock=shock, params=params,
        endpoint_tol=float(max(err_l, err_r)), left_rate=left_rate, right_rate=right_rate,
    )


def sample_profile(profile: ShockProfile, xi):
    """Evaluate ``(V, U, Theta)`` at ``xi``.

    Inside the grid the interpolant is cubic Hermite with nodal slopes taken from the
    ODE; beyond it the sampled end deviation decays at the linearised rate, so far
    outside the grid the end states are returned exactly.
    """
    xi = np.asarray(xi, dtype=float)
    sh = profile.shock
    V, T = profile.evaluate(xi)
    # reproduce stored nodes bit-for-bit
    if xi.ndim and xi.size == profile.xi.size and np.array_equal(xi, profile.xi):
        V, T = profile.V.copy(), profile.Theta.copy()
    U = np.where(V == sh.left.v, sh.left.u,
                 np.where(V == sh.right.v, sh.right.u, -(sh.s * V + sh.a)))
    if xi.ndim == 0:
        return float(V), float(U), float(T)
    return V, U, T


@dataclass(frozen=True)
class DecayFit:
    """Envelope ``|V - v±| <= c1_hat d exp(-c2_hat d |xi|)`` fitted on both tails."""

    c1_hat: float
    c2_hat: float
    fit_window: tuple
    rate_left: float
    rate_right: float
    theta_rate_left: float
    theta_rate_right: float
    rms: float


def _tail_fit(x, y):
    A = np.column_stack([np.ones_like(x), x])
    coef, *_ = np.linalg.lstsq(A, np.log(y), rcond=None)
    resid = np.log(y) - A @ coef
    return coef[0], -coef[1], float(np.sqrt(np.mean(resid ** 2)))


def decay_fit(profile: ShockProfile, upper: float = 1e-4, floor: float = 1e-11) -> DecayFit:
    """Least-squares fit of ``log|V - v±|`` against ``|xi|`` on each tail.

    Only samples with ``floor*d < |V - v±| < upper*d`` enter, which keeps the fit
    inside the linear regime and above round-off.
    """
    sh = profile.shock
    d = sh.d
    out = {}
    windows = []
    for side, ref_v, ref_t, mask_side in (
        ("left", sh.left.v, sh.left.theta, profile.xi < 0.0),
        ("right", sh.right.v, sh.right.theta, profile.xi > 0.0),
    ):
        dv = np.abs(profile.V - ref_v)
        dt = np.abs(profile.Theta - ref_t)
        sel = mask_side & (dv < upper * d) & (dv > floor * d)
        if sel.sum() < 8:
            raise FitError(f"only {int(sel.sum())} usable samples on the {side} tail")
        ax = np.abs(profile.xi[sel])
        logc, rate, rms = _tail_fit(ax, dv[sel])
        selt = mask_side & (dt < upper * d) & (dt > floor * d)
        if selt.sum() < 8:
            raise FitError(f"only {int(selt.sum())} usable temperature samples on the {side} tail")
        _, trate, _ = _tail_fit(np.abs(profile.xi[selt]), dt[selt])
        out[side] = (math.exp(logc) / d, rate, rms, trate)
        windows.append((float(ax.min()), float(ax.max())))
    rate_min = min(out["left"][1], out["right"][1])
    return DecayFit(
        c1_hat=max(out["left"][0], out["right"][0]),
        c2_hat=rate_min / d,
        fit_window=tuple(windows),
        rate_left=out["left"][1],
        rate_right=out["right"][1],
        theta_rate_left=out["left"][3],
        theta_rate_right=out["right"][3],
        rms=max(out["left"][2], out["right"][2]),
    )


def slope_ratio(profile: ShockProfile, rel_floor: float = 1e-6) -> float:
    """``max |Theta' / V'|`` over samples whose volume slope is resolved.

    Samples with ``|V'| < rel_floor * max|V'|`` are skipped: there both slopes are at
    round-off level and their quotient is meaningless.
    """
    dV, dT = profile_rhs(profile.V, profile.Theta, profile.shock, profile.params)
    keep = np.abs(dV) >= rel_floor * np.abs(dV).max()
    return float(np.max(np.abs(dT[keep] / dV[keep])))
