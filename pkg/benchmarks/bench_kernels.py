"""Compare the compiled and NumPy time-stepping kernels.

Usage::

    python benchmarks/bench_kernels.py [--sizes 500 2000 8000] [--steps 200]

For each grid size the script times ``rhs`` and a fixed number of ``advance``
steps on the stability configuration, checks that both backends agree, and
prints a table of wall times and speed-ups.
"""
from __future__ import annotations

import argparse
import sys
import timeit

import numpy as np

from fbshock import _kernels_py
from fbshock.gas import GasParams, ThermoState
from fbshock.hugoniot import solve_left_state, theta_minus_for_strength
from fbshock.profile import compute_profile
from fbshock.solver import init_state

try:
    from fbshock import _kernels as _kernels_c
except ImportError:  # extension not built
    _kernels_c = None


def _state(N):
    P = GasParams(gamma=1.4)
    right = ThermoState(2.0, 0.0, 1.0)
    sh = solve_left_state(right, theta_minus_for_strength(right, 0.5, P), P)
    prof = compute_profile(sh, P)
    x = np.linspace(0.0, 300.0, N + 1)
    g = 5e-3 * np.exp(-0.5 * (x - 54.0) ** 2)
    return init_state(prof, 54.0, N=N, L=300.0, perturbation=(g, g, g))


def _args(st):
    P = st.params
    return (st.dx, P.gamma, P.R, P.mu, P.kappa, st.p0, st.theta_minus)


def bench_rhs(mod, st, repeat):
    out = [np.empty_like(st.v) for _ in range(3)]
    call = lambda: mod.rhs(st.v, st.u, st.theta, *out, *_args(st))  # noqa: E731
    call()
    return min(timeit.repeat(call, number=1, repeat=repeat)), out


def bench_advance(mod, st, steps, repeat):
    P = st.params
    best, final = np.inf, None
    for _ in range(repeat):
        v, u, th = st.v.copy(), st.u.copy(), st.theta.copy()
        t0 = timeit.default_timer()
        mod.advance(v, u, th, 0.0, np.inf, steps, 0.4, np.inf, 1e-8, st.dx,
                    P.gamma, P.R, P.mu, P.kappa, st.p0, st.theta_minus)
        best = min(best, timeit.default_timer() - t0)
        final = (v, u, th)
    return best, final


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=[500, 2000, 8000])
    ap.add_argument("--steps", type=int, default=200)
    ap.add_argument("--repeat", type=int, default=5)
    a = ap.parse_args(argv)
    if _kernels_c is None:
        print("compiled extension not available; build with `pip install -e . --no-build-isolation`")
        return 1
    print(f"{'N':>6} {'rhs numpy':>12} {'rhs cython':>12} {'x':>6} "
          f"{'adv numpy':>12} {'adv cython':>12} {'x':>6} {'max diff':>10}")
    for N in a.sizes:
        st = _state(N)
        r_py, o_py = bench_rhs(_kernels_py, st, a.repeat)
        r_c, o_c = bench_rhs(_kernels_c, st, a.repeat)
        a_py, f_py = bench_advance(_kernels_py, st, a.steps, max(1, a.repeat // 2))
        a_c, f_c = bench_advance(_kernels_c, st, a.steps, max(1, a.repeat // 2))
        diff = max(max(float(np.max(np.abs(p - c))) for p, c in zip(o_py, o_c)),
                   max(float(np.max(np.abs(p - c))) for p, c in zip(f_py, f_c)))
        print(f"{N:>6} {r_py * 1e3:>10.3f}ms {r_c * 1e3:>10.3f}ms {r_py / r_c:>6.1f} "
              f"{a_py * 1e3:>10.2f}ms {a_c * 1e3:>10.2f}ms {a_py / a_c:>6.1f} {diff:>10.2e}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
