"""Exception hierarchy shared by all secnet modules."""


class SecnetError(Exception):
    """Base class for every error raised by this package."""


class ConfigError(SecnetError, ValueError):
    """A scenario parameter violates one of its invariants."""


class NumericError(SecnetError, ArithmeticError):
    """Base class for failures of a numerical routine."""


class DomainError(NumericError, ValueError):
    """Argument outside the domain of a special function."""


class NonConvergence(NumericError):
    """A series or continued fraction did not converge within its cap."""

    def __init__(self, message, iterations=None):
        super().__init__(message)
        self.iterations = iterations


class DivergentIntegral(NumericError):
    """The requested power-law integral is infinite."""


class ToleranceNotMet(NumericError):
    """An adaptive rule could not reach the requested tolerance."""


class DegenerateSignal(NumericError):
    """No relays are possible, so no Gamma fit exists for T(z)."""


class DegenerateJamming(NumericError):
    """No jammers are possible, so no Gamma fit exists for I(z)."""


class ProbabilityRangeError(NumericError):
    """A computed probability fell outside [0, 1] by more than rounding slack."""


class StageError(NumericError):
    """Wraps a numeric failure with the name of the pipeline stage that raised it."""

    def __init__(self, stage, cause):
        super().__init__(f"stage {stage!r} failed: {type(cause).__name__}: {cause}")
        self.stage = stage
        self.cause = cause
