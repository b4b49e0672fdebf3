"""Exception types raised by the library."""


class GaborFIOError(Exception):
    """Base class for all library errors."""


class ModelError(GaborFIOError):
    """Inconsistent model data (length mismatch, bad index set, invalid config)."""


class WindowError(GaborFIOError):
    """Zero or otherwise unusable window."""


class FrameDeficient(GaborFIOError):
    """Gabor system is not a frame (lower bound at the noise floor)."""


class SolveError(GaborFIOError):
    """Newton/bisection solve for the canonical map did not converge."""


class NondegeneracyViolation(GaborFIOError):
    """Condition B3 fails: the A-block of the symplectic matrix is (near) singular."""


class UnitError(GaborFIOError):
    """Dilation argument is not a unit mod L."""


class FitError(GaborFIOError):
    """Too few populated bins for a decay fit."""


class SingularOperator(GaborFIOError):
    """Operator is singular or too ill-conditioned to invert."""


class NotInClass(GaborFIOError):
    """Gabor matrix does not decay along the expected canonical transformation."""


class SizeError(GaborFIOError):
    """Problem size exceeds a documented hard cap."""


class ConfigError(GaborFIOError):
    """Experiment configuration failed to parse or validate."""
