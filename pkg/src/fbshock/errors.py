"""Exception hierarchy shared by all stages of the pipeline."""


class FBShockError(Exception):
    """Base class for every error raised by :mod:`fbshock`."""


class DomainError(FBShockError, ValueError):
    """A thermodynamic input lies outside its admissible range."""


class NoAdmissibleShock(FBShockError):
    """The requested end states cannot be joined by a compressive 3-shock."""


class AmbiguousShock(FBShockError):
    """More than one candidate left state passes the entropy test."""


class NumericError(FBShockError):
    """An iterative or algebraic solve failed to meet its tolerance."""


class OrbitEscape(FBShockError):
    """The profile trajectory left the rectangle spanned by the end states."""


class SlowConvergence(FBShockError):
    """The profile did not reach the right fixed point within the allowed span."""


class FitError(FBShockError):
    """Not enough usable samples for a tail fit."""


class NonIntegrablePerturbation(FBShockError):
    """Initial velocity data do not settle to the far-field value."""


class ConfigError(FBShockError, ValueError):
    """Invalid run configuration (bad key, value, or superposition)."""


class BlowUp(FBShockError):
    """Positivity loss or non-finite values during time stepping.

    Attributes
    ----------
    node : int
        Grid index of the first offending node.
    time : float
        Simulation time at which the violation was detected.
    """

    def __init__(self, message, node=-1, time=float("nan")):
        super().__init__(f"{message} (node={node}, t={time:.6g})")
        self.node = node
        self.time = time


class StageError(FBShockError):
    """Wraps an error raised inside an experiment stage, naming the stage."""

    def __init__(self, stage, cause):
        super().__init__(f"[{stage}] {type(cause).__name__}: {cause}")
        self.stage = stage
        self.cause = cause
