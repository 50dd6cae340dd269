"""Exception hierarchy shared by every module."""


class PtboundError(Exception):
    """Base class for all errors raised by this package."""


class ValidationError(PtboundError, ValueError):
    """Input failed a structural or numerical validation check."""


class DimensionMismatchError(ValidationError):
    pass


class HermiticityError(ValidationError):
    pass


class PriorSumError(ValidationError):
    pass


class NonPositivePriorError(ValidationError):
    pass


class NonPSDStateError(ValidationError):
    pass


class TraceError(ValidationError):
    pass


class PovmError(ValidationError):
    pass


class CapacityError(ValidationError):
    """Operator dimension exceeds the supported maximum."""


class NumericalFailure(PtboundError, ArithmeticError):
    """A numerical kernel did not reach its accuracy target.

    ``residual`` carries the quantity that failed to converge.
    """

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class SolverFailure(NumericalFailure):
    """Interior-point solve failed; ``trace_log`` holds the central-path log so far."""

    def __init__(self, message, residual=None, trace_log=()):
        super().__init__(message, residual)
        self.trace_log = list(trace_log)
