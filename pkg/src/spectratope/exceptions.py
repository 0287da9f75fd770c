"""Exception hierarchy.

Input problems derive from :class:`ValueError`; numerical breakdowns derive
from :class:`NumericalFailure` so the CLI can map them to a distinct exit code.
"""


class SpectratopeError(Exception):
    """Base class for every error raised by this package."""


class NumericalFailure(SpectratopeError, ArithmeticError):
    """A computation broke down (singular pivot, no convergence, ...)."""


class SingularMatrix(NumericalFailure):
    pass


class NoConvergence(NumericalFailure):
    pass


class BranchTrackingFailure(NumericalFailure):
    pass


class MultipleRoots(NumericalFailure):
    pass


class InputError(SpectratopeError, ValueError):
    """Arguments violate an operation's precondition."""


class DimensionMismatch(InputError):
    pass


class LengthMismatch(DimensionMismatch):
    pass


class InvalidScaling(InputError):
    pass


class NotPerronSimilarity(InputError):
    pass


class NotAnEigenvector(InputError):
    pass


class NotStochastic(InputError):
    pass


class InvalidEndpoints(InputError):
    pass


class AlphaOutOfRange(InputError):
    pass


class WrongArcType(InputError):
    pass


class NotInRegion(InputError):
    pass


class ParseError(InputError):
    def __init__(self, message, position=None):
        super().__init__(message if position is None else f"{message} (at {position})")
        self.position = position
