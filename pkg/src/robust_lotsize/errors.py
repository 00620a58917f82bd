"""Exception hierarchy shared by all solvers."""


class LotSizingError(Exception):
    """Base class for package errors."""


class DimensionError(LotSizingError, ValueError):
    """Array lengths or indices do not match the instance horizon."""


class PreconditionError(LotSizingError, ValueError):
    """A solver was called on an instance outside its domain."""


class StructuralError(LotSizingError, ValueError):
    """A linear program is malformed."""


class InfeasibleError(LotSizingError):
    """The feasible production set (or an LP) is empty."""


class NumericalError(LotSizingError, RuntimeError):
    """The simplex method hit its iteration limit or lost accuracy."""

    def __init__(self, message, best_bound=None):
        super().__init__(message)
        self.best_bound = best_bound


class SizeGuardError(LotSizingError, ValueError):
    """An exhaustive oracle was asked to enumerate a too-large instance."""


class DomainError(LotSizingError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class BudgetTypeError(PreconditionError, TypeError):
    """A solver for one budget kind received an instance with the other kind."""


class FormatError(LotSizingError, ValueError):
    """An instance, plan or scenario file does not follow the expected JSON layout."""
