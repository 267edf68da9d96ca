"""NumPy implementation of the Lagrangian Navier-Stokes kernels.

Mirrors ``_kernels.pyx`` call-for-call; used when the compiled module is missing
or ``FBSHOCK_PURE_PYTHON=1`` is set.
"""
import math

import numpy as np

OK = 0
BLOWUP = 1


def rhs(v, u, th, dv, du, dth, dx, gamma, R, mu, kappa, p0, theta_minus):
    """Fill ``dv, du, dth`` with the semi-discrete right-hand side."""
    cv = R / (gamma - 1.0)
    p = R * th / v
    vh = 0.5 * (v[1:] + v[:-1])
    sig = -0.5 * (p[1:] + p[:-1]) + mu * (u[1:] - u[:-1]) / (dx * vh)
    q = kappa * (th[1:] - th[:-1]) / (dx * vh)
    ux = (u[2:] - u[:-2]) / (2.0 * dx)

    dv[1:-1] = ux
    du[1:-1] = (sig[1:] - sig[:-1]) / dx
    dth[1:-1] = (-p[1:-1] * ux + (q[1:] - q[:-1]) / dx + mu * ux * ux / v[1:-1]) / cv

    # x = 0: v follows from u_x fixed by the stress condition; u from a one-sided
    # second-order stress derivative on the points 0, dx/2, 3dx/2
    dv[0] = (R * theta_minus / v[0] - p0) * v[0] / mu
    du[0] = (8.0 * p0 + 9.0 * sig[0] - sig[1]) / (3.0 * dx)
    dth[0] = 0.0
    dv[-1] = 0.0
    du[-1] = 0.0
    dth[-1] = 0.0


def stable_dt(v, th, dx, gamma, R, mu, kappa, cfl):
    lam = math.sqrt(gamma * R * float(np.max(th / (v * v))))
    diff = max(mu, kappa * (gamma - 1.0) / R)
    return cfl * min(dx / lam, dx * dx * float(np.min(v)) / (2.0 * diff))


def _bad_node(v, th, floor):
    bad = ~((v > floor) & (th > floor) & np.isfinite(v) & np.isfinite(th))
    return int(np.argmax(bad)) if bad.any() else -1


def advance(v, u, th, t, t_end, max_steps, cfl, dt_max, floor,
            dx, gamma, R, mu, kappa, p0, theta_minus):
    """Heun steps in place until ``t_end`` or ``max_steps``.

    Returns ``(t, steps, status, node)``; ``status == BLOWUP`` leaves the arrays at
    the last accepted state and ``node`` names the first offending index.
    """
    n = v.shape[0]
    k1 = [np.empty(n) for _ in range(3)]
    k2 = [np.empty(n) for _ in range(3)]
    steps = 0
    while steps < max_steps and t < t_end:
        dt = min(stable_dt(v, th, dx, gamma, R, mu, kappa, cfl), dt_max, t_end - t)
        rhs(v, u, th, *k1, dx, gamma, R, mu, kappa, p0, theta_minus)
        v1 = v + dt * k1[0]
        u1 = u + dt * k1[1]
        th1 = th + dt * k1[2]
        node = _bad_node(v1, th1, floor)
        if node >= 0:
            return t, steps, BLOWUP, node
        rhs(v1, u1, th1, *k2, dx, gamma, R, mu, kappa, p0, theta_minus)
        v2 = 0.5 * (v + v1 + dt * k2[0])
        u2 = 0.5 * (u + u1 + dt * k2[1])
        th2 = 0.5 * (th + th1 + dt * k2[2])
        node = _bad_node(v2, th2, floor)
        if node >= 0:
            return t, steps, BLOWUP, node
        v[:] = v2
        u[:] = u2
        th[:] = th2
        # t_end may be hit exactly by the clipped step
        t = t_end if dt == t_end - t else t + dt
        steps += 1
    return t, steps, OK, -1
