"""Exception types shared across the package."""


class EllipsephicError(Exception):
    """Base class for all package errors."""


class ParseError(EllipsephicError):
    pass


class OverflowRiskError(EllipsephicError):
    """A requested computation would leave the 64-bit integer range."""


class BudgetExceededError(EllipsephicError):
    """An enumeration or support-size budget would be violated."""


class LevelNotDivisibleError(EllipsephicError):
    pass


class LevelTooSmallError(EllipsephicError):
    pass


class CarryoverPresentError(EllipsephicError):
    pass


class ZeroVectorError(EllipsephicError):
    pass


class NonFiniteError(EllipsephicError):
    pass


class InvariantViolationError(EllipsephicError):
    """A mathematical invariant that should hold unconditionally failed."""
