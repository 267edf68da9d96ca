"""Experiment orchestration: hugoniot -> profile -> shift -> simulate -> diagnostics.

``run_experiment`` is deterministic: the same configuration produces
byte-identical CSV and report files.
"""
from __future__ import annotations

import csv
import json
import math
import os
import re
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from . import diagnostics as dg
from .config import RunConfig, default_output_dir
from .errors import FBShockError, StageError
from .hugoniot import (ShockData, check_entropy, rh_residual, shock_speed_formula,
                       solve_left_state, theta_minus_for_strength)
from .profile import ShockProfile, compute_profile, decay_fit, sample_profile, slope_ratio
from .shift import ShiftResult, compute_alpha, dI_dalpha
from .solver import SimState, init_state, run


@dataclass(frozen=True)
class Verdict:
    """Named pass/fail outcome with the measured value and its threshold."""

    name: str
    criterion: int
    passed: bool
    value: float
    threshold: float
    detail: str = ""

    def line(self) -> str:
        tag = "PASS" if self.passed else "FAIL"
        extra = f"  ({self.detail})" if self.detail else ""
        return (f"[{tag}] criterion {self.criterion:>2} {self.name}: "
                f"value={self.value:.6g} threshold={self.threshold:.6g}{extra}")


@dataclass
class ExperimentReport:
    name: str
    config: dict
    shock: dict = field(default_factory=dict)
    profile: dict = field(default_factory=dict)
    alpha: float = math.nan
    verdicts: list = field(default_factory=list)
    files: dict = field(default_factory=dict)
    regime: dict = field(default_factory=dict)
    error: str | None = None
    stage: str | None = None

    @property
    def passed(self) -> bool:
        return self.error is None and all(v.passed for v in self.verdicts)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["passed"] = self.passed
        return d

    def to_json(self) -> str:
        return json.dumps(_jsonable(self.to_dict()), indent=2, sort_keys=True)


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        f = float(obj)
        return f if math.isfinite(f) else repr(f)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


@dataclass
class Experiment:
    """Intermediate products of one configuration, filled stage by stage."""

    config: RunConfig
    shock: ShockData | None = None
    profile: ShockProfile | None = None
    rate: float = math.nan
    beta: float = math.nan
    t_end: float = math.nan
    L: float = math.nan
    state0: SimState | None = None
    shift: ShiftResult | None = None
    series: dg.DiagnosticsSeries | None = None
    final: SimState | None = None
    snapshots: list = field(default_factory=list)
    _coarse: "Experiment | None" = None


def _stage(name, fn, *args, **kw):
    try:
        return fn(*args, **kw)
    except (FBShockError, ValueError, ArithmeticError) as exc:
        if isinstance(exc, StageError):
            raise
        raise StageError(name, exc) from exc


def perturbation_fields(config: RunConfig, profile: ShockProfile, x, beta: float):
    """Field triple ``(dv, du, dtheta)`` described by ``config.perturbation``."""
    spec = config.perturbation
    zero = np.zeros_like(x)
    if spec.shape == "none" or spec.amplitude == 0.0:
        return None
    A = spec.absolute_amplitude(profile.shock.d)
    if spec.shape == "profile_shift":
        base = sample_profile(profile, x - beta)
        moved = sample_profile(profile, x - beta - A)
        return tuple(m - b for m, b in zip(moved, base))
    c = beta if spec.center is None else spec.center
    g = A * np.exp(-0.5 * ((x - c) / spec.width) ** 2)
    return tuple(g if f in spec.fields else zero for f in ("v", "u", "theta"))


def build_shock(config: RunConfig) -> ShockData:
    P = config.params
    P.warn_if_outside_theory()
    tm = config.theta_minus
    if tm is None:
        tm = theta_minus_for_strength(config.right_state, config.strength, P)
    return solve_left_state(config.right_state, tm, P)


def prepare(config: RunConfig, N: int | None = None) -> Experiment:
    """Run the hugoniot, profile and shift stages."""
    ex = Experiment(config)
    ex.shock = _stage("hugoniot", build_shock, config)
    ex.profile = _stage("profile", compute_profile, ex.shock, config.params)
    fit = _stage("profile", decay_fit, ex.profile)
    ex.rate = fit.c2_hat * ex.shock.d
    ex.beta = config.resolve_beta(ex.rate)
    ex.t_end = config.resolve_t_end(ex.shock.s, ex.rate)
    ex.L = config.resolve_L(ex.beta, ex.shock.s, ex.t_end, ex.rate)
    n = N or config.grid.N
    x = np.linspace(0.0, ex.L, n + 1)
    pert = _stage("shift", perturbation_fields, config, ex.profile, x, ex.beta)
    ex.state0 = _stage("shift", init_state, ex.profile, ex.beta, N=n, L=ex.L, perturbation=pert)
    ex.shift = _stage("shift", compute_alpha, ex.state0.x, ex.state0.u, ex.profile, ex.beta)
    return ex


def simulate(ex: Experiment) -> Experiment:
    """Advance to ``t_end`` with the diagnostics monitor, stopping at snapshot times."""
    cfg = ex.config
    mon = dg.Monitor(ex.profile, ex.shift.alpha, ex.beta)
    stops = sorted({float(t) for t in cfg.snapshots if 0.0 <= t < ex.t_end}) + [ex.t_end]
    state, records = ex.state0, []
    for t_stop in stops:
        res = _stage("simulate", run, state, t_stop, cfg.ctrl, [mon], cfg.observe_every)
        records.extend(res.records if not records else res.records[1:])
        state = res.state
        if t_stop in cfg.snapshots or (t_stop < ex.t_end):
            ex.snapshots.append(state.copy())
    ex.final = state
    series = dg.DiagnosticsSeries.from_records(records)
    resid = dg.momentum_identity_residual(series, ex.profile, ex.shift.alpha, ex.beta)
    ex.series = series.with_column("residual_momentum", resid)
    return ex


def coarse(ex: Experiment) -> Experiment:
    """Same configuration at half resolution (cached)."""
    if ex._coarse is None:
        ex._coarse = simulate(prepare(ex.config, N=ex.config.grid.N // 2))
    return ex._coarse


def traveling_wave_errors(config: RunConfig, levels=(4, 2, 1)):
    """Sup deviation from the exactly translated profile for unperturbed data at ``N/k``."""
    cfg = config.replace(perturbation=type(config.perturbation)())
    errs = []
    for k in levels:
        ex = prepare(cfg, N=config.grid.N // k)
        res = _stage("simulate", run, ex.state0, ex.t_end, cfg.ctrl, (), 10 ** 9)
        f = dg.perturbation(res.state, ex.profile, 0.0, ex.beta)
        errs.append(f.sup_norm())
    return errs


def regime(ex: Experiment) -> dict:
    """Smallness indicators reported alongside each run (not enforced)."""
    P, sh = ex.config.params, ex.shock
    out = {"gamma_minus_1_times_d": (P.gamma - 1.0) * sh.d,
           "tail_at_boundary": math.exp(-ex.rate * ex.beta)}
    if ex.series is not None:
        out["N0_surrogate"] = float(ex.series["N_sur"][0])
        out["N_T_surrogate"] = float(ex.series.N_of_t()[-1])
    s0 = ex.state0
    ux = (s0.u[1] - s0.u[0]) / s0.dx
    out["compatibility_residual"] = float(P.R * s0.theta[0] / s0.v[0] - P.mu * ux / s0.v[0] - s0.p0)
    return out


# -- verdicts ---------------------------------------------------------------

def _v(name, criterion, value, threshold, passed=None, detail=""):
    ok = bool(value <= threshold) if passed is None else bool(passed)
    return Verdict(name, criterion, ok, float(value), float(threshold), detail)


def check_rh(ex):
    res = max(abs(r) for r in rh_residual(ex.shock, ex.config.params))
    lax = check_entropy(ex.shock, ex.config.params)
    return [_v("rh_residual", 1, res, 1e-10, passed=res <= 1e-10 and lax, detail=f"lax={lax}")]


def check_shock_speed(ex):
    s2 = ex.shock.s ** 2
    rel = abs(shock_speed_formula(ex.shock, ex.config.params) - s2) / s2
    return [_v("shock_speed_identity", 2, rel, 1e-10)]


def check_profile(ex):
    pr = ex.profile
    fit = decay_fit(pr)
    mono = bool(np.all(np.diff(pr.V) > 0.0) and np.all(np.diff(pr.Theta) < 0.0))
    rate_err = max(abs(fit.rate_left - pr.left_rate) / pr.left_rate,
                   abs(fit.rate_right - pr.right_rate) / pr.right_rate)
    return [_v("profile_endpoint_tol", 3, pr.endpoint_tol, 1e-8),
            _v("profile_monotone", 3, 0.0 if mono else 1.0, 0.0),
            _v("profile_tail_rate", 3, rate_err, 0.05)]


def check_shift_derivative(ex):
    sh = ex.shock
    target = sh.left.u - sh.right.u
    val = dI_dalpha(0.0, ex.state0.x, ex.state0.u, ex.profile, ex.beta)
    return [_v("shift_derivative", 4, abs(val - target) / abs(target), 1e-6)]


def check_traveling_wave(ex):
    errs = traveling_wave_errors(ex.config)
    ratios = [errs[i] / errs[i + 1] for i in range(len(errs) - 1)]
    ok = all(3.0 <= r <= 5.0 for r in ratios)
    return [_v("traveling_wave_order", 5, min(ratios), 3.0, passed=ok,
               detail="errors=" + ",".join(f"{e:.3e}" for e in errs)
               + " ratios=" + ",".join(f"{r:.3f}" for r in ratios))]


def check_relaxation(ex):
    sh, P = ex.shock, ex.config.params
    S = ex.series
    fit = dg.boundary_relaxation_check(S.times, S["v0"], sh.p0, P.mu, sh.left.v)
    if fit.status != "ok":
        return [_v("relaxation_slope", 6, math.inf, 0.05, passed=False, detail=fit.status)]
    expected = -sh.p0 / P.mu
    slope_err = abs(fit.slope - expected) / abs(expected)
    a0 = abs(S["v0"][0] - sh.left.v)
    amp_err = abs(math.exp(fit.intercept) - a0) / a0
    return [_v("relaxation_slope", 6, slope_err, 0.05, detail=f"slope={fit.slope:.6g}"),
            _v("relaxation_amplitude", 6, amp_err, 0.10)]


def check_momentum(ex):
    sh = ex.shock
    scale = abs(sh.right.u - sh.left.u) * sh.d
    fine = float(np.max(np.abs(ex.series["residual_momentum"])))
    crs = float(np.max(np.abs(coarse(ex).series["residual_momentum"])))
    ratio = crs / fine if fine > 0 else math.inf
    return [_v("momentum_residual", 7, fine, 0.01 * scale),
            _v("momentum_refinement_ratio", 7, ratio, 3.0, passed=ratio >= 3.0,
               detail=f"coarse={crs:.3e} fine={fine:.3e}")]


def check_stability(ex):
    sup = ex.series["sup_norm"]
    return [_v("sup_norm_decay", 8, sup[-1] / sup[0], 0.2)]


def check_psi(ex):
    fine = dg.boundary_psi_check(ex.series, ex.profile, ex.shift.alpha, ex.beta)
    c = coarse(ex)
    crs = dg.boundary_psi_check(c.series, c.profile, c.shift.alpha, c.beta)
    maxA = float(np.max(np.abs(ex.series["A"])))
    disc = abs(crs - fine) / 3.0
    return [_v("boundary_psi", 9, fine, 0.05 * maxA + disc,
               detail=f"max|A|={maxA:.3e} discretization={disc:.3e}")]


def check_wrong_shift(ex):
    sh = ex.shock
    du = abs(sh.right.u - sh.left.u)
    m = abs(float(ex.series["mom_wrong"][-1]))
    return [_v("wrong_shift_momentum", 9, abs(m - du) / du, 0.10, detail=f"integral={m:.6g}")]


def check_e1(ex):
    S = ex.series
    equiv = bool(np.all(S["e1_equiv_ok"]))
    E = S["E1"]
    bound = 2.0 * (E[0] + dg.e1_boundary_term(S)[-1])
    return [_v("e1_equivalence", 11, 0.0 if equiv else 1.0, 0.0,
               detail=f"max nodes outside [v-,v+]={int(np.max(S['e1_nodes_outside']))}"),
            _v("e1_growth", 11, float(np.max(E)), bound)]


CHECKERS = {
    "rh": check_rh, "shock_speed": check_shock_speed, "profile": check_profile,
    "shift_derivative": check_shift_derivative, "traveling_wave": check_traveling_wave,
    "relaxation": check_relaxation, "momentum": check_momentum, "stability": check_stability,
    "psi": check_psi, "wrong_shift": check_wrong_shift, "e1": check_e1,
}
NEEDS_RUN = {"relaxation", "momentum", "stability", "psi", "wrong_shift", "e1"}


# -- persistence --------------------------------------------------------------

def _slug(name: str) -> str:
    return re.sub(r"[^A-Za-z0-9_.=-]+", "_", name).strip("_") or "run"


def write_snapshot(state: SimState, path: str) -> None:
    with open(path, "w", newline="") as fh:
        wr = csv.writer(fh, lineterminator="\n")
        wr.writerow(("x", "v", "u", "theta"))
        for row in zip(state.x, state.v, state.u, state.theta):
            wr.writerow([repr(float(c)) for c in row])


def write_profile(profile: ShockProfile, path: str) -> None:
    with open(path, "w", newline="") as fh:
        wr = csv.writer(fh, lineterminator="\n")
        wr.writerow(("xi", "V", "U", "Theta"))
        for row in zip(profile.xi, profile.V, profile.U, profile.Theta):
            wr.writerow([repr(float(c)) for c in row])


def profile_summary(profile: ShockProfile) -> dict:
    fit = decay_fit(profile)
    return {"endpoint_tol": profile.endpoint_tol, "c1_hat": fit.c1_hat, "c2_hat": fit.c2_hat,
            "span": profile.span, "left_rate": profile.left_rate,
            "right_rate": profile.right_rate, "fit_rms": fit.rms,
            "slope_ratio": slope_ratio(profile)}


def run_experiment(config: RunConfig, write: bool = True, out_dir: str | None = None,
                   checks=None, simulate_run: bool | None = None) -> ExperimentReport:
    """Execute every stage of ``config`` and evaluate the requested checks.

    Errors from any stage propagate as :class:`StageError` naming the stage.
    """
    checks = tuple(config.checks if checks is None else checks)
    report = ExperimentReport(name=config.name, config=config.to_dict())
    ex = prepare(config)
    report.shock = ex.shock.as_dict()
    report.profile = profile_summary(ex.profile)
    report.alpha = float(ex.shift.alpha)
    if simulate_run is None:
        simulate_run = bool(NEEDS_RUN & set(checks)) or write
    if simulate_run:
        simulate(ex)
    report.regime = regime(ex)
    for name in checks:
        report.verdicts.extend(_stage("diagnostics", CHECKERS[name], ex))
    if write:
        root = os.path.join(out_dir or config.output_dir or default_output_dir(), _slug(config.name))
        os.makedirs(root, exist_ok=True)
        files = {}
        if ex.series is not None:
            files["series"] = os.path.join(root, "series.csv")
            ex.series.to_csv(files["series"])
        for i, snap in enumerate(ex.snapshots):
            p = os.path.join(root, f"snapshot_{i:03d}.csv")
            write_snapshot(snap, p)
            files[f"snapshot_t={snap.t:.6g}"] = p
        files["report"] = os.path.join(root, "report.json")
        report.files = files
        with open(files["report"], "w") as fh:
            fh.write(report.to_json() + "\n")
    report._experiment = ex  # not serialised; handy for callers holding the report
    return report


def _safe_run(args):
    config, write, out_dir = args
    try:
        rep = run_experiment(config, write=write, out_dir=out_dir)
        rep.__dict__.pop("_experiment", None)
        return rep
    except Exception as exc:  # crash isolation: record and move on
        stage = getattr(exc, "stage", None)
        return ExperimentReport(name=config.name, config=config.to_dict(),
                                error=f"{type(exc).__name__}: {exc}", stage=stage)


def sweep(configs, write: bool = True, out_dir: str | None = None,
          workers: int = 1) -> list[ExperimentReport]:
    """Run each configuration independently; a failing entry never stops the others."""
    jobs = [(c, write, out_dir) for c in configs]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(_safe_run, jobs))
    return [_safe_run(j) for j in jobs]


def sweep_table(reports) -> list[dict]:
    """One row per report: name, offset, shift and verdict status."""
    rows = []
    for r in reports:
        cfg = r.config
        rows.append({"name": r.name, "beta": cfg.get("beta"), "beta_units": cfg.get("beta_units"),
                     "N": cfg.get("grid", {}).get("N"), "alpha": r.alpha,
                     "abs_alpha": abs(r.alpha), "passed": r.passed, "error": r.error or ""})
    return rows


def write_table(rows, path: str) -> None:
    if not rows:
        open(path, "w").close()
        return
    with open(path, "w", newline="") as fh:
        wr = csv.DictWriter(fh, fieldnames=list(rows[0]), lineterminator="\n")
        wr.writeheader()
        for r in rows:
            wr.writerow({k: (repr(float(v)) if isinstance(v, float) else v) for k, v in r.items()})
