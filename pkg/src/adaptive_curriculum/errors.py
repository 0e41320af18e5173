"""Exception hierarchy shared by every engine module.

All engine errors derive from :class:`EngineError` so callers can catch one
base type at a boundary (the CLI and the HTTP service both do).
"""

from __future__ import annotations

__all__ = [
    "EngineError",
    "ValidationError",
    "OrderingError",
    "DomainError",
    "CatalogError",
    "ConfigurationError",
    "ProviderError",
    "IntegrityError",
]


class EngineError(Exception):
    """Base class for errors raised by this package."""


class ValidationError(EngineError, ValueError):
    """An input violates a documented range, shape, or reference constraint."""


class OrderingError(ValidationError):
    """An operation would make interaction timestamps non-monotone."""


class DomainError(EngineError, ValueError):
    """The operation is undefined for this input (empty pathway, empty log, ...)."""


class CatalogError(EngineError, ValueError):
    """Catalog construction or loading failed; the message names the offending id."""


class ConfigurationError(EngineError, ValueError):
    """Provider or service configuration is incomplete or contradictory."""


class ProviderError(EngineError, RuntimeError):
    """A remote explanation call failed; ``__cause__`` carries the transport error."""


class IntegrityError(EngineError, RuntimeError):
    """A persisted event log is unusable (gap or duplicate in the sequence)."""
