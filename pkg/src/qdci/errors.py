"""Exception types shared across the package."""


class QdciError(Exception):
    """Base class for all package errors."""


class DomainError(QdciError, ValueError):
    """An argument lies outside the domain an operation is defined on."""


class ValidationError(QdciError, ValueError):
    """Input data fails a structural check (non-subgroup, non-homomorphism, ...)."""


class ResourceError(QdciError, RuntimeError):
    """An enumeration cap or budget would be exceeded.

    Raised instead of silently truncating a search.
    """
