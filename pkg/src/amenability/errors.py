"""Exception types.

Every error carries the module and operation that raised it so the CLI can
report failures as ``[module.operation] message``.
"""

from __future__ import annotations


class AmenabilityError(Exception):
    def __init__(self, message: str, *, module: str = "", operation: str = "", **details):
        self.message = message
        self.module = module
        self.operation = operation
        self.details = details
        super().__init__(str(self))

    def __str__(self) -> str:
        where = ".".join(p for p in (self.module, self.operation) if p)
        return f"[{where}] {self.message}" if where else self.message


# group_core
class AxiomViolation(AmenabilityError):
    pass


class OrderLimitExceeded(AmenabilityError):
    pass


class NotGenerated(AmenabilityError):
    pass


class EmptySet(AmenabilityError):
    pass


class TriangleViolation(AmenabilityError):
    pass


class ParseError(AmenabilityError):
    pass


# group_functions
class UnsupportedExponent(AmenabilityError):
    pass


class NegativeEntry(AmenabilityError):
    pass


class NotUnitNorm(AmenabilityError):
    pass


class GroupMismatch(AmenabilityError):
    pass


# certificates
class BudgetExhausted(AmenabilityError):
    """Search gave up; ``best_ratio`` is evidence, not a proof of failure."""

    def __init__(self, message: str, *, best_ratio: float, best_set=None, **kw):
        super().__init__(message, best_ratio=best_ratio, **kw)
        self.best_ratio = best_ratio
        self.best_set = best_set


class DegenerateInput(AmenabilityError):
    pass


class DisconnectedSupport(AmenabilityError):
    pass


class EigensolveFailure(AmenabilityError):
    pass


class TargetOutOfRange(AmenabilityError):
    pass


class PreconditionViolated(AmenabilityError):
    pass


class GeodesicNotFound(AmenabilityError):
    pass


class AssertionFailed(AmenabilityError):
    """A post-condition of a construction did not hold (names the clause)."""

    pass


class FamilyMismatch(AmenabilityError):
    pass


# operators
class EntryOutOfRange(AmenabilityError):
    pass


class NoConvergence(AmenabilityError):
    def __init__(self, message: str, *, iterate=None, residual: float = float("nan"), **kw):
        super().__init__(message, residual=residual, **kw)
        self.iterate = iterate
        self.residual = residual


# property_a
class SupportViolation(AmenabilityError):
    pass


class EmptyFamilyMember(AmenabilityError):
    pass


class DisjointSets(AmenabilityError):
    pass


class AllZero(AmenabilityError):
    pass
