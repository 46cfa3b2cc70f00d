"""Exception types shared across the package."""


class ChirpEchoError(Exception):
    """Base class for all package errors."""


class ParameterError(ChirpEchoError):
    """A physical parameter or argument violates its documented range."""


class ConfigError(ChirpEchoError):
    """Config file cannot be parsed or contains unknown/invalid entries."""


class ScheduleError(ChirpEchoError):
    """A pulse schedule is structurally invalid (overlaps, bad ordering)."""


class FitError(ChirpEchoError):
    """A least-squares fit failed to converge or is degenerate."""
