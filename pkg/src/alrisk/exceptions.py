"""Exception types shared across the package."""


class AlriskError(Exception):
    """Base class for all alrisk errors."""


class DomainError(AlriskError, ValueError):
    """A parameter or argument lies outside its mathematical domain."""


class InputError(AlriskError, ValueError):
    """Structurally invalid input data (lengths, ordering, counts)."""


class ParseError(AlriskError, ValueError):
    """Malformed input file; message carries the offending line number."""


class FilterDivergenceError(AlriskError):
    """The score recursion produced a non-finite or exploding state."""

    def __init__(self, message: str, time_index: int | None = None):
        super().__init__(message)
        self.time_index = time_index


class EstimationError(AlriskError):
    """Maximum-likelihood estimation failed (all starting points diverged)."""


class StateError(AlriskError):
    """An operation was called on a result that is not in the required state."""


class DegenerateInputError(AlriskError, ValueError):
    """Input is too degenerate for the statistic (constant data, singular design)."""


class InsufficientExceedancesError(AlriskError):
    """Too few VaR exceedances to run the bootstrap test."""
