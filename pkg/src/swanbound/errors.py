"""Exception hierarchy.

``InputError`` subclasses signal bad or out-of-scope input (CLI exit 2).
``RedAlert`` subclasses signal that an internal mathematical cross-check
failed (CLI exit 1).
"""

from __future__ import annotations


class SwanboundError(Exception):
    """Base class for every error raised by this package."""


class InputError(SwanboundError, ValueError):
    pass


class RedAlert(SwanboundError):
    pass


class RejectEvenChar(InputError):
    pass


class TowerMismatch(InputError):
    pass


class DivisionByZero(InputError, ZeroDivisionError):
    pass


class BudgetExceeded(InputError):
    pass


class NonIntegral(InputError):
    pass


class BadConjugationIndex(InputError):
    pass


class UnnormalizedConstant(InputError):
    pass


class BadThreshold(InputError):
    pass


class NonIntegralScaling(InputError):
    pass


class PrecisionLoss(InputError):
    pass


class NotASquare(InputError):
    pass


class RamifiedPlace(InputError):
    pass


class PoleOnV(InputError):
    pass


class DegenerateCharacter(InputError):
    pass


class BadConductor(InputError):
    pass


class TruncationTooSmall(InputError):
    pass


class ValidityTooLow(InputError):
    pass


class NoConvergence(InputError):
    pass


class ScopeError(InputError):
    pass


class ConfigError(InputError):
    pass


class IntegralityFailure(RedAlert):
    pass


class DegreeOverflow(RedAlert):
    pass


class NonDivisible(RedAlert):
    pass


class LiesAboveViolation(RedAlert):
    pass


class ConsistencyFailure(RedAlert):
    pass


class OracleMismatch(RedAlert):
    pass
