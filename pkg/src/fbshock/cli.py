"""Command line entry point ``fbshock``.

Exit codes: 0 when every requested verdict passes, 1 when a verdict fails,
2 for configuration or usage errors, 3 when a computation stage raises.
"""
from __future__ import annotations

import argparse
import csv
import json
import os
import sys

import numpy as np

from . import acceptance, harness
from .config import OUTPUT_ENV, default_output_dir, parse_config, parse_sweep
from .errors import ConfigError, FBShockError
from .shift import compute_alpha, dI_dalpha

EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_RUNTIME = 0, 1, 2, 3


class _Out:
    def __init__(self, quiet: bool):
        self.quiet = quiet

    def __call__(self, *lines):
        if not self.quiet:
            for ln in lines:
                print(ln)


def _load(args, required=True):
    if args.config is None:
        if required:
            raise ConfigError("--config is required for this subcommand")
        return None
    with open(args.config) as fh:
        return fh.read()


def _outdir(args, name=None):
    root = args.out or default_output_dir()
    path = os.path.join(root, harness._slug(name)) if name else root
    os.makedirs(path, exist_ok=True)
    return path


def _write_json(path, obj):
    with open(path, "w") as fh:
        fh.write(json.dumps(harness._jsonable(obj), indent=2, sort_keys=True) + "\n")


def _print_verdicts(out, verdicts):
    out(*(v.line() for v in verdicts))
    return EXIT_OK if all(v.passed for v in verdicts) else EXIT_FAIL


def cmd_hugoniot(args, out):
    cfg = parse_config(_load(args))
    shock = harness.build_shock(cfg)
    rec = shock.as_dict()
    width = max(len(k) for k in rec)
    out(*(f"{k:<{width}}  {v!r}" for k, v in rec.items()))
    out(json.dumps(harness._jsonable(rec), sort_keys=True))
    _write_json(os.path.join(_outdir(args, cfg.name), "hugoniot.json"), rec)
    verdicts = harness.check_rh(_Shim(cfg, shock)) + harness.check_shock_speed(_Shim(cfg, shock))
    return _print_verdicts(out, verdicts)


class _Shim:
    """Minimal stand-in exposing ``config`` and ``shock`` to the checkers."""

    def __init__(self, config, shock):
        self.config, self.shock = config, shock


def cmd_profile(args, out):
    cfg = parse_config(_load(args))
    ex = harness.prepare(cfg)
    d = _outdir(args, cfg.name)
    harness.write_profile(ex.profile, os.path.join(d, "profile.csv"))
    summary = harness.profile_summary(ex.profile)
    _write_json(os.path.join(d, "profile_summary.json"), summary)
    out(*(f"{k:<13} {v!r}" for k, v in summary.items()))
    return _print_verdicts(out, harness.check_profile(ex))


def _read_initial(path):
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    try:
        return {k: np.array([float(r[k]) for r in rows]) for k in ("x", "v", "u", "theta")}
    except KeyError as exc:
        raise ConfigError(f"initial-data file lacks column {exc}") from exc


def cmd_shift(args, out):
    cfg = parse_config(_load(args))
    ex = harness.prepare(cfg)
    if args.initial:
        data = _read_initial(args.initial)
        x, u0 = data["x"], data["u"]
    else:
        x, u0 = ex.state0.x, ex.state0.u
    res = compute_alpha(x, u0, ex.profile, ex.beta)
    sh = ex.shock
    target = sh.left.u - sh.right.u
    deriv = dI_dalpha(res.alpha, x, u0, ex.profile, ex.beta)
    rel = abs(deriv - target) / abs(target)
    rec = {"alpha": res.alpha, "I0": res.I0, "beta": res.beta, "quad_tol": res.quad_tol,
           "dI_dalpha": deriv, "u_minus_minus_u_plus": target}
    out(*(f"{k:<21} {v!r}" for k, v in rec.items()))
    _write_json(os.path.join(_outdir(args, cfg.name), "shift.json"), rec)
    return _print_verdicts(out, [harness._v("shift_derivative", 4, rel, 1e-6)])


def cmd_simulate(args, out):
    cfg = parse_config(_load(args))
    rep = harness.run_experiment(cfg, write=True, out_dir=args.out)
    out(f"alpha = {rep.alpha!r}", *(f"wrote {k}: {v}" for k, v in rep.files.items()))
    return _print_verdicts(out, rep.verdicts)


def cmd_verify(args, out):
    text = _load(args, required=False)
    if text is None:
        sel = [int(c) for c in args.criteria.split(",")] if args.criteria else None
        verdicts = acceptance.run_all(sel)
        _write_json(os.path.join(_outdir(args), "verify.json"),
                    [v.__dict__ for v in verdicts])
        return _print_verdicts(out, verdicts)
    cfg = parse_config(text)
    checks = cfg.checks or ("rh", "shock_speed", "profile", "shift_derivative",
                            "momentum", "stability", "psi", "wrong_shift", "e1")
    rep = harness.run_experiment(cfg, write=True, out_dir=args.out, checks=checks)
    return _print_verdicts(out, rep.verdicts)


def cmd_sweep(args, out):
    configs = parse_sweep(_load(args))
    reports = harness.sweep(configs, write=True, out_dir=args.out, workers=args.workers)
    rows = harness.sweep_table(reports)
    harness.write_table(rows, os.path.join(_outdir(args), "sweep.csv"))
    for r in rows:
        out(f"{r['name']:<40} alpha={r['alpha']!r:<24} passed={r['passed']} {r['error']}")
    verdicts = [v for r in reports for v in r.verdicts]
    trend = alpha_trend(reports)
    if trend is not None:
        verdicts.append(trend)
    code = _print_verdicts(out, verdicts)
    if any(r.error for r in reports):
        return EXIT_RUNTIME
    return code


def alpha_trend(reports):
    """Strict decrease of ``|alpha|`` in ``beta`` when only the offset varies."""
    ok = [r for r in reports if r.error is None]
    if len(ok) < 2:
        return None
    strip = lambda c: {k: v for k, v in c.items() if k not in ("beta", "name", "output_dir")}  # noqa: E731
    if any(strip(r.config) != strip(ok[0].config) for r in ok):
        return None
    ok.sort(key=lambda r: r.config["beta"])
    a = [abs(r.alpha) for r in ok]
    steps = [a[i] - a[i + 1] for i in range(len(a) - 1)]
    return harness._v("alpha_decreasing", 10, min(steps), 0.0, passed=min(steps) > 0.0,
                      detail="|alpha|=" + ",".join(f"{x:.6e}" for x in a))


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="YAML/JSON run configuration")
    common.add_argument("--out", help=f"output directory (default ${OUTPUT_ENV} or ./fbshock-out)")
    common.add_argument("--quiet", action="store_true", help="suppress console output")
    p = argparse.ArgumentParser(prog="fbshock", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("hugoniot", parents=[common], help="left state and shock speed")
    sub.add_parser("profile", parents=[common], help="viscous profile CSV and summary")
    sp = sub.add_parser("shift", parents=[common], help="shift alpha of the initial data")
    sp.add_argument("--initial", help="CSV with columns x,v,u,theta (default: from config)")
    sub.add_parser("simulate", parents=[common], help="run and write the diagnostics series")
    vp = sub.add_parser("verify", parents=[common],
                        help="acceptance checks (built-in suite without --config)")
    vp.add_argument("--criteria", help="comma-separated criterion numbers for the built-in suite")
    wp = sub.add_parser("sweep", parents=[common], help="run a family of configurations")
    wp.add_argument("--workers", type=int, default=1)
    return p


COMMANDS = {"hugoniot": cmd_hugoniot, "profile": cmd_profile, "shift": cmd_shift,
            "simulate": cmd_simulate, "verify": cmd_verify, "sweep": cmd_sweep}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    out = _Out(args.quiet)
    try:
        return COMMANDS[args.command](args, out)
    except (ConfigError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except FBShockError as exc:
        print(f"error: {exc}", file=sys.stderr)
        if isinstance(getattr(exc, "cause", None), ConfigError):
            return EXIT_CONFIG
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
