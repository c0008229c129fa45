"""Exception hierarchy shared by every module."""

from __future__ import annotations


class FeynCountError(Exception):
    """Base class for all library errors."""


class UsageError(FeynCountError, ValueError):
    """Operands are incompatible (mismatched orders, bad names, bad files)."""


class DomainError(FeynCountError, ValueError):
    """An operation is undefined for the given input, e.g. exp of a series
    with nonzero constant term."""


class CapExceeded(FeynCountError, ValueError):
    """A requested size is beyond the exhaustive-enumeration cap."""


class FinitenessError(FeynCountError, ArithmeticError):
    """A truncated coefficient would require an infinite sum.

    Raised when no bound on the number of legs exists for a model, which is
    exactly the situation where the formal coefficient diverges (or is an
    infinite series that cannot be held as an exact rational).
    """
