"""Exception hierarchy."""


class HeavyTailError(Exception):
    """Base class for all package errors."""


class DivergentArgumentError(HeavyTailError, ValueError):
    """A zeta-type series was requested at an argument where it diverges."""


class DomainError(HeavyTailError, ValueError):
    """Argument outside the support of a distribution or function."""


class ConstraintError(HeavyTailError, ValueError):
    """Parameter values violate the model constraints."""


class NormalizerError(HeavyTailError, ArithmeticError):
    """The normalising constant could not be bounded to the requested tolerance."""


class TuningFailure(HeavyTailError, RuntimeError):
    """Pilot MCMC run could not find a usable proposal scale."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class DataError(HeavyTailError, ValueError):
    """Malformed or unusable input data."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class SaturationError(HeavyTailError):
    """The deviation function never exceeds the x_min threshold for any posterior draw."""
