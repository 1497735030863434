"""Exception hierarchy shared by all solver stages."""

from __future__ import annotations


class L1RankError(Exception):
    """Base class for every error raised by this package."""


class DimensionError(L1RankError, ValueError):
    """Operands have incompatible lengths or shapes."""


class ParseError(L1RankError, ValueError):
    """A matrix, instance or config file is malformed."""


class InfeasibleInstanceError(L1RankError, ValueError):
    """An instance has an empty relation and therefore no solution."""


class EncodingError(L1RankError, ValueError):
    """A center tuple does not satisfy the relations of an encoding."""


class ParameterError(L1RankError, ValueError):
    """A numeric parameter is outside its admissible range."""


class BudgetError(L1RankError):
    """An enumeration would exceed its configured budget.

    ``stage`` names the pipeline stage that refused to run, so a caller
    can tell a family-generation overflow from an oracle overflow.
    """

    def __init__(self, message: str, stage: str | None = None):
        self.stage = stage
        if stage:
            message = f"[{stage}] {message}"
        super().__init__(message)


class ContractViolation(L1RankError, AssertionError):
    """An internal post-condition failed; always indicates a bug."""
