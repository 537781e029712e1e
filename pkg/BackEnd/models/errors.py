"""Exception hierarchy for the thin-position engine.

Every engine error carries the operation it came from (``context``) and the
offending identifiers (``details``) so that front ends can print precise
diagnostics without parsing messages.
"""

from __future__ import annotations

from typing import Any, Optional


class EngineError(Exception):
    """Base class for every domain error raised by the engine."""

    def __init__(
        self,
        message: str,
        context: Optional[str] = None,
        details: Optional[dict[str, Any]] = None,
    ):
        super().__init__(message)
        self.message = message
        self.context = context
        self.details = details or {}

    def __str__(self) -> str:
        return self.message


class SchemaError(EngineError):
    """Raised when a document does not conform to its schema."""


class ComplexError(EngineError):
    """Raised when a complex violates a structural requirement."""


class UnknownIdentifierError(EngineError, KeyError):
    """Raised when a brick or facet id does not belong to the complex."""

    def __str__(self) -> str:
        return self.message


class UnsupportedKindError(EngineError):
    """Raised when an operation is not defined for a complex kind."""


class OrderingError(EngineError):
    """Raised for malformed orderings and out-of-range heights."""


class MoveError(EngineError):
    """Raised when a delay or advance precondition fails."""


class HypothesisError(EngineError):
    """Raised when inputs violate the hypotheses of a checked bound."""


class SearchLimitError(EngineError):
    """Raised when a search would exceed its configured cap."""


class TheoremViolation(EngineError):
    """Raised when extraction on a certified locally thin ordering contradicts the theorem."""


class PartitionError(EngineError):
    """Raised when a brick partition is not total or leaves a side empty."""


class ConsistencyError(EngineError):
    """Raised when two computations of the same quantity disagree."""
