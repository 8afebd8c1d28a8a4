"""Exception types raised across the package."""


class NilflowError(Exception):
    pass


class NotNilpotent(NilflowError):
    pass


class AbelianAlgebra(NilflowError):
    pass


class DimensionMismatch(NilflowError, ValueError):
    pass


class NoPositiveSolution(NilflowError):
    pass


class NotSoliton(NilflowError):
    pass


class SubsetBudgetExceeded(NilflowError):
    pass


class UnknownEntry(NilflowError, KeyError):
    pass


class IntegrationError(NilflowError):
    """Base for integrator failures; carries the last accepted state."""

    def __init__(self, message, t=None, y=None):
        super().__init__(message)
        self.t = t
        self.y = y


class StepLimitExceeded(IntegrationError):
    pass


class StepUnderflow(IntegrationError):
    pass


class SchemaError(NilflowError, ValueError):
    """Malformed input file; the message names the file and the offending field or line."""
