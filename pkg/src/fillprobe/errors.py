"""Exception hierarchy shared across the package."""

from __future__ import annotations


class FillprobeError(Exception):
    """Base class for all package errors."""


class PresentationSyntaxError(FillprobeError):
    """Malformed presentation source.  Carries a 1-based position."""

    def __init__(self, message: str, line: int = 0, column: int = 0):
        self.line = line
        self.column = column
        super().__init__(f"line {line}, column {column}: {message}" if line else message)


class IncompleteSystemError(FillprobeError):
    """An operation required a confluent rewriting system."""


class ResourceLimitError(FillprobeError):
    """A configured cap (vertices, walks, solver nodes) was exceeded."""

    def __init__(self, message: str, *, limit: int | None = None):
        self.limit = limit
        super().__init__(message)


class NodeBudgetError(ResourceLimitError):
    """Branch-and-bound ran out of nodes.

    Carries the best bounds known at abort time: ``lower`` from open
    relaxations, ``upper``/``witness`` from the incumbent (may be None).
    """

    def __init__(self, message: str, *, limit: int, lower, upper=None, witness=None):
        super().__init__(message, limit=limit)
        self.lower = lower
        self.upper = upper
        self.witness = witness


class NotACycleError(FillprobeError):
    """A chain handed to a filling operation is not a 1-cycle."""


class NotABoundaryError(FillprobeError):
    """No filling exists within the truncated complex (NoWithinBall)."""
