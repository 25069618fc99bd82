"""
Error types raised by the solidhull library.
"""


class SolidHullError(Exception):
    """Base class for all library errors."""


class ArgumentError(SolidHullError, ValueError):
    """A precondition on an argument was violated."""


class CoverageError(SolidHullError, ValueError):
    """Coefficient support reaches beyond the available blocks."""


class NumericDomainError(SolidHullError, ArithmeticError):
    """A numerical procedure left its domain (non-finite input, failed bracket)."""
