"""Exception types raised by bjortho."""

from __future__ import annotations


class BJError(ValueError):
    """Base class for all library errors."""


class DegenerateZero(BJError):
    """An operation needs a nonzero element and got the zero element."""


class BadExponent(BJError):
    pass


class ShapeError(BJError):
    pass


class RoleError(BJError):
    """Elements from incompatible spaces (sup vs p-norm, different p, weights)."""


class FieldMismatch(BJError):
    pass


class NoCertificate(BJError):
    """A certificate could not be built within tolerance."""


class Unsupported(BJError):
    pass
