# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled Heun/central-difference kernels; see ``_kernels_py`` for the reference."""
from libc.math cimport sqrt, isfinite, INFINITY
import numpy as np

cdef enum:
    _OK = 0
    _BLOWUP = 1

OK = _OK
BLOWUP = _BLOWUP


cdef void _rhs(const double[::1] v, const double[::1] u, const double[::1] th,
               double[::1] dv, double[::1] du, double[::1] dth,
               double dx, double gamma, double R, double mu, double kappa,
               double p0, double theta_minus) noexcept nogil:
    cdef Py_ssize_t n = v.shape[0], i
    cdef double cv = R / (gamma - 1.0)
    cdef double pl, pc, pr, vl, vr, sl, sr, ql, qr, ux, sig0, sig1
    # running left-midpoint fluxes
    pl = R * th[0] / v[0]
    pc = R * th[1] / v[1]
    vl = 0.5 * (v[0] + v[1])
    sl = -0.5 * (pl + pc) + mu * (u[1] - u[0]) / (dx * vl)
    ql = kappa * (th[1] - th[0]) / (dx * vl)
    sig0 = sl
    for i in range(1, n - 1):
        pr = R * th[i + 1] / v[i + 1]
        vr = 0.5 * (v[i] + v[i + 1])
        sr = -0.5 * (pc + pr) + mu * (u[i + 1] - u[i]) / (dx * vr)
        qr = kappa * (th[i + 1] - th[i]) / (dx * vr)
        ux = (u[i + 1] - u[i - 1]) / (2.0 * dx)
        dv[i] = ux
        du[i] = (sr - sl) / dx
        dth[i] = (-pc * ux + (qr - ql) / dx + mu * ux * ux / v[i]) / cv
        if i == 1:
            sig1 = sr
        pc = pr
        sl = sr
        ql = qr
    dv[0] = (R * theta_minus / v[0] - p0) * v[0] / mu
    du[0] = (8.0 * p0 + 9.0 * sig0 - sig1) / (3.0 * dx)
    dth[0] = 0.0
    dv[n - 1] = 0.0
    du[n - 1] = 0.0
    dth[n - 1] = 0.0


def rhs(double[::1] v, double[::1] u, double[::1] th,
        double[::1] dv, double[::1] du, double[::1] dth,
        double dx, double gamma, double R, double mu, double kappa,
        double p0, double theta_minus):
    """Fill ``dv, du, dth`` with the semi-discrete right-hand side."""
    if v.shape[0] < 3:
        raise ValueError("need at least 3 nodes")
    _rhs(v, u, th, dv, du, dth, dx, gamma, R, mu, kappa, p0, theta_minus)


cdef double _stable_dt(const double[::1] v, const double[::1] th, double dx, double gamma,
                       double R, double mu, double kappa, double cfl) noexcept nogil:
    cdef Py_ssize_t i, n = v.shape[0]
    cdef double wmax = 0.0, vmin = INFINITY, w, diff
    for i in range(n):
        w = th[i] / (v[i] * v[i])
        if w > wmax:
            wmax = w
        if v[i] < vmin:
            vmin = v[i]
    diff = mu
    if kappa * (gamma - 1.0) / R > diff:
        diff = kappa * (gamma - 1.0) / R
    w = dx / sqrt(gamma * R * wmax)
    if dx * dx * vmin / (2.0 * diff) < w:
        w = dx * dx * vmin / (2.0 * diff)
    return cfl * w


def stable_dt(double[::1] v, double[::1] th, double dx, double gamma, double R,
              double mu, double kappa, double cfl):
    return _stable_dt(v, th, dx, gamma, R, mu, kappa, cfl)


cdef Py_ssize_t _bad_node(const double[::1] v, const double[::1] th, double floor) noexcept nogil:
    cdef Py_ssize_t i
    for i in range(v.shape[0]):
        if not (v[i] > floor and th[i] > floor and isfinite(v[i]) and isfinite(th[i])):
            return i
    return -1


def advance(double[::1] v, double[::1] u, double[::1] th, double t, double t_end,
            long max_steps, double cfl, double dt_max, double floor,
            double dx, double gamma, double R, double mu, double kappa,
            double p0, double theta_minus):
    """Heun steps in place until ``t_end`` or ``max_steps``; returns ``(t, steps, status, node)``."""
    cdef Py_ssize_t n = v.shape[0], i, node = -1
    cdef long steps = 0
    cdef double dt
    cdef int status = _OK
    if n < 3:
        raise ValueError("need at least 3 nodes")
    work = np.empty((9, n))
    cdef double[:, ::1] w = work
    cdef double[::1] a0 = w[0], a1 = w[1], a2 = w[2]
    cdef double[::1] b0 = w[3], b1 = w[4], b2 = w[5]
    cdef double[::1] v1 = w[6], u1 = w[7], th1 = w[8]
    with nogil:
        while steps < max_steps and t < t_end:
            dt = _stable_dt(v, th, dx, gamma, R, mu, kappa, cfl)
            if dt_max < dt:
                dt = dt_max
            if t_end - t < dt:
                dt = t_end - t
            _rhs(v, u, th, a0, a1, a2, dx, gamma, R, mu, kappa, p0, theta_minus)
            for i in range(n):
                v1[i] = v[i] + dt * a0[i]
                u1[i] = u[i] + dt * a1[i]
                th1[i] = th[i] + dt * a2[i]
            node = _bad_node(v1, th1, floor)
            if node >= 0:
                status = _BLOWUP
                break
            _rhs(v1, u1, th1, b0, b1, b2, dx, gamma, R, mu, kappa, p0, theta_minus)
            # second stage written into the stage-1 buffers, checked before commit
            for i in range(n):
                v1[i] = 0.5 * (v[i] + v1[i] + dt * b0[i])
                u1[i] = 0.5 * (u[i] + u1[i] + dt * b1[i])
                th1[i] = 0.5 * (th[i] + th1[i] + dt * b2[i])
            node = _bad_node(v1, th1, floor)
            if node >= 0:
                status = _BLOWUP
                break
            for i in range(n):
                v[i] = v1[i]
                u[i] = u1[i]
                th[i] = th1[i]
            if dt == t_end - t:
                t = t_end
            else:
                t = t + dt
            steps += 1
    return t, steps, status, node
