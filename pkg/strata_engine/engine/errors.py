"""Exception hierarchy shared by all engine components.

The CLI maps ``InvalidInputError`` to exit code 2 and ``ConsistencyError``
to exit code 3.
"""

from typing import Any, Optional


class StrataError(Exception):
    """Base class for every error raised by the engine."""


class InvalidInputError(StrataError, ValueError):
    """Malformed partitions, violated preconditions, out-of-range arguments."""


class GuardExceededError(InvalidInputError):
    """A configured size guard (Bell number, forest count) was exceeded."""

    def __init__(self, guard: str, limit: int, actual: int):
        self.guard = guard
        self.limit = limit
        self.actual = actual
        super().__init__(f"guard '{guard}' exceeded: {actual} > {limit}")


class ConsistencyError(StrataError):
    """An internal-consistency check failed; the computation cannot be trusted."""

    def __init__(self, message: str, witness: Optional[Any] = None):
        self.witness = witness
        if witness is not None:
            message = f"{message} (witness: {witness})"
        super().__init__(message)


class BoundaryError(ConsistencyError):
    """Missing face or a boundary operator with nonzero square."""


class MatchingError(ConsistencyError):
    """Non-cover pair, imperfect or cyclic matching, Condition aleph failure."""


class Beta0MismatchError(ConsistencyError):
    """Component counts of X and of the bracketed-partition poset differ."""
