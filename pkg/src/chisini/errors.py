"""Exception hierarchy shared by all modules."""


class ChisiniError(Exception):
    """Base class for every error raised by this package."""


class UnboundedDomain(ChisiniError):
    pass


class PointOutOfBox(ChisiniError):
    pass


class ArityMismatch(ChisiniError):
    pass


class NotSubinterval(ChisiniError):
    pass


class InvalidGrid(ChisiniError):
    pass


class UnknownFunction(ChisiniError):
    pass


class InvalidParams(ChisiniError):
    pass


class NotMonotone(ChisiniError):
    pass


class NotInRange(ChisiniError):
    pass


class PreconditionFailed(ChisiniError):
    pass


class GridTooLarge(ChisiniError):
    pass


class Unsolvable(ChisiniError):
    """The Chisini equation has no solution: ran(delta_F) != ran(F)."""

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class NotIdempotizable(ChisiniError):
    pass


class GeneratorNotMonotone(ChisiniError):
    pass
