"""Exception types raised across the package."""

from __future__ import annotations


class MDReduceError(Exception):
    """Base class for all errors raised by mdreduce."""


class GroundSizeMismatch(MDReduceError, ValueError):
    pass


class MissingEntry(MDReduceError, KeyError):
    pass


class EnumerationCapExceeded(MDReduceError):
    """A 2^m loop was requested above the configured enumeration cap."""

    def __init__(self, size: int, cap: int, what: str = "enumeration"):
        super().__init__(f"{what} over {size} items exceeds enumeration cap {cap}")
        self.size = size
        self.cap = cap


class NotMatroidBased(MDReduceError, TypeError):
    pass


class InvalidMatching(MDReduceError, ValueError):
    pass


class DegenerateInstance(MDReduceError):
    """Some consecutive optimal gap of an SADP instance is zero."""


class ProvenanceError(MDReduceError, ValueError):
    pass


class BudgetExceeded(MDReduceError):
    """An oracle algorithm issued more queries than its budget allows."""


class BudgetOverflow(MDReduceError, OverflowError):
    pass


class SolverFault(MDReduceError, RuntimeError):
    """The LP solver reached a state that the model rules out."""


class DocumentError(MDReduceError, ValueError):
    """A document failed parsing, schema or semantic validation."""

    def __init__(self, path: str, message: str, category: str = "semantic"):
        super().__init__(f"{category} error at {path or '/'}: {message}")
        self.path = path
        self.message = message
        self.category = category
