"""Run configuration: schema, defaults and validation.

The document grammar is described in ``docs/config.md``. Documents are YAML;
JSON is accepted because it is a subset.
"""
from __future__ import annotations

import dataclasses
import math
import os
from dataclasses import dataclass

import yaml

from .errors import ConfigError
from .gas import GasParams, ThermoState
from .solver import StepControl

N_MIN = 200
OUTPUT_ENV = "FBSHOCK_OUTPUT_DIR"
DEFAULT_OUTPUT = "fbshock-out"

SHAPES = ("none", "gaussian_bump", "profile_shift")
FIELDS = ("v", "u", "theta")
CHECKS = ("rh", "shock_speed", "profile", "shift_derivative", "traveling_wave", "relaxation",
          "momentum", "stability", "psi", "wrong_shift", "e1")


def default_output_dir() -> str:
    return os.environ.get(OUTPUT_ENV) or DEFAULT_OUTPUT


@dataclass(frozen=True)
class PerturbationSpec:
    """Initial perturbation added to the shifted profile.

    ``gaussian_bump`` adds ``amplitude * exp(-(x - center)^2 / (2 width^2))`` to each
    listed field. ``profile_shift`` instead starts from the profile translated by
    ``amplitude`` in ``x``.
    """

    shape: str = "none"
    amplitude: float = 0.0
    amplitude_units: str = "strength"
    center: float | None = None
    width: float = 1.0
    fields: tuple = FIELDS

    def __post_init__(self):
        if self.shape not in SHAPES:
            raise ConfigError(f"perturbation.shape must be one of {SHAPES}, got {self.shape!r}")
        if not self.amplitude >= 0.0:
            raise ConfigError("perturbation.amplitude must be non-negative")
        if self.amplitude_units not in ("absolute", "strength"):
            raise ConfigError("perturbation.amplitude_units must be 'absolute' or 'strength'")
        if not self.width > 0.0:
            raise ConfigError("perturbation.width must be positive")
        bad = [f for f in self.fields if f not in FIELDS]
        if bad:
            raise ConfigError(f"perturbation.fields has unknown entries {bad}")

    def absolute_amplitude(self, d: float) -> float:
        return self.amplitude * (d if self.amplitude_units == "strength" else 1.0)


@dataclass(frozen=True)
class GridSpec:
    """``N`` intervals on ``[0, L]``.

    With ``L`` unset the length is ``beta + L_factor/(c2 d)``; ``follow_shock``
    extends it to ``beta + s t_end + 40/(c2 d)`` when that is longer.
    """

    N: int = 2000
    L: float | None = None
    L_factor: float = 60.0
    follow_shock: bool = True

    def __post_init__(self):
        if int(self.N) != self.N or self.N < N_MIN:
            raise ConfigError(f"N below minimum ({N_MIN}): got {self.N}")
        if self.L is not None and not self.L > 0.0:
            raise ConfigError("grid.L must be positive")
        if self.L_factor < 40.0:
            raise ConfigError("grid.L_factor must be at least 40")


@dataclass(frozen=True)
class RunConfig:
    right_state: ThermoState
    theta_minus: float | None = None
    strength: float | None = None
    name: str = "run"
    params: GasParams = GasParams(gamma=1.4)
    beta: float = 20.0
    beta_units: str = "decay"
    perturbation: PerturbationSpec = PerturbationSpec()
    grid: GridSpec = GridSpec()
    ctrl: StepControl = StepControl()
    t_end: float = 50.0
    t_end_units: str = "decay"
    observe_every: int = 200
    snapshots: tuple = ()
    checks: tuple = ()
    seed: int = 0
    output_dir: str | None = None

    def __post_init__(self):
        if (self.theta_minus is None) == (self.strength is None):
            raise ConfigError("give exactly one of theta_minus and strength")
        if self.beta_units not in ("absolute", "decay"):
            raise ConfigError("beta_units must be 'absolute' or 'decay'")
        if self.t_end_units not in ("absolute", "decay", "crossing"):
            raise ConfigError("t_end_units must be 'absolute', 'decay' or 'crossing'")
        if not self.beta >= 0.0 or not self.t_end >= 0.0:
            raise ConfigError("beta and t_end must be non-negative")
        if self.observe_every < 1:
            raise ConfigError("observe_every must be at least 1")
        bad = [c for c in self.checks if c not in CHECKS]
        if bad:
            raise ConfigError(f"unknown check(s) {bad}; known: {CHECKS}")

    def resolve_beta(self, rate: float) -> float:
        """Absolute offset given the decay rate ``c2 d``."""
        return self.beta / rate if self.beta_units == "decay" else self.beta

    def resolve_t_end(self, s: float, rate: float) -> float:
        if self.t_end_units == "decay":
            return self.t_end / (s * rate)
        if self.t_end_units == "crossing":
            return self.t_end / s
        return self.t_end

    def resolve_L(self, beta: float, s: float, t_end: float, rate: float) -> float:
        g = self.grid
        if g.L is not None:
            return g.L
        L = beta + g.L_factor / rate
        if g.follow_shock:
            L = max(L, beta + s * t_end + 40.0 / rate)
        return L

    def replace(self, **changes) -> "RunConfig":
        return dataclasses.replace(self, **changes)

    def to_dict(self) -> dict:
        out = dataclasses.asdict(self)
        out["snapshots"] = list(self.snapshots)
        out["checks"] = list(self.checks)
        out["perturbation"]["fields"] = list(self.perturbation.fields)
        if math.isinf(out["ctrl"]["dt_max"]):
            out["ctrl"]["dt_max"] = None
        return out


_SECTIONS = {
    "params": (GasParams, {"gamma", "R", "mu", "kappa"}),
    "right_state": (ThermoState, {"v", "u", "theta"}),
    "perturbation": (PerturbationSpec, {f.name for f in dataclasses.fields(PerturbationSpec)}),
    "grid": (GridSpec, {f.name for f in dataclasses.fields(GridSpec)}),
    "ctrl": (StepControl, {f.name for f in dataclasses.fields(StepControl)}),
}
_TOP = {f.name for f in dataclasses.fields(RunConfig)}


def _section(key, value):
    cls, allowed = _SECTIONS[key]
    if not isinstance(value, dict):
        raise ConfigError(f"{key} must be a mapping")
    for k in value:
        if k not in allowed:
            raise ConfigError(f"unknown key {k!r} in {key}")
    kw = dict(value)
    if key == "params":
        kw.setdefault("gamma", 1.4)
    if key == "perturbation" and "fields" in kw:
        kw["fields"] = tuple(kw["fields"])
    if key == "ctrl" and kw.get("dt_max") is None:
        kw.pop("dt_max", None)
    try:
        return cls(**kw)
    except ConfigError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"invalid {key}: {exc}") from exc


def config_from_dict(doc: dict) -> RunConfig:
    """Validate a parsed mapping and fill defaults."""
    if not isinstance(doc, dict):
        raise ConfigError("configuration document must be a mapping")
    for k in doc:
        if k not in _TOP:
            raise ConfigError(f"unknown key {k!r}")
    if "right_state" not in doc:
        raise ConfigError("missing required key 'right_state'")
    kw = {}
    for k, v in doc.items():
        if k in _SECTIONS:
            kw[k] = _section(k, v)
        elif k in ("snapshots", "checks"):
            kw[k] = tuple(v or ())
        else:
            kw[k] = v
    try:
        return RunConfig(**kw)
    except ConfigError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc


def parse_config(text: str) -> RunConfig:
    """Parse a YAML/JSON configuration document.

    Raises
    ------
    ConfigError
        On malformed text, unknown keys (the message names the key) or invalid values.
    """
    try:
        doc = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError(f"malformed configuration: {exc}") from exc
    if isinstance(doc, dict) and "sweep" in doc:
        raise ConfigError("document describes a sweep; use parse_sweep")
    return config_from_dict(doc)


def _set_path(doc: dict, dotted: str, value):
    parts = dotted.split(".")
    cur = doc
    for p in parts[:-1]:
        cur = cur.setdefault(p, {})
    cur[parts[-1]] = value


def parse_sweep(text: str) -> list[RunConfig]:
    """Expand ``{base: {...}, sweep: {dotted.key: [values...]}}`` into configs.

    Several swept keys are combined element-wise and must have equal lengths.
    A plain single-run document yields a one-element list.
    """
    try:
        doc = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError(f"malformed configuration: {exc}") from exc
    if not isinstance(doc, dict):
        raise ConfigError("configuration document must be a mapping")
    if "sweep" not in doc:
        return [config_from_dict(doc)]
    extra = set(doc) - {"base", "sweep"}
    if extra:
        raise ConfigError(f"unknown key {sorted(extra)[0]!r} in sweep document")
    base, sweep = doc.get("base") or {}, doc["sweep"] or {}
    lengths = {len(v) for v in sweep.values()}
    if len(lengths) > 1:
        raise ConfigError("swept value lists must have equal lengths")
    n = lengths.pop() if lengths else 0
    out = []
    for i in range(n):
        d = yaml.safe_load(yaml.safe_dump(base))
        label = []
        for key, vals in sweep.items():
            _set_path(d, key, vals[i])
            label.append(f"{key.split('.')[-1]}={vals[i]}")
        d.setdefault("name", "run")
        d["name"] = f"{d['name']}[{','.join(label)}]"
        out.append(config_from_dict(d))
    return out
