"""Exception hierarchy shared by every module of the toolkit."""

from typing import Any


class SantaloError(Exception):
    """Base class; carries a short machine-readable code and optional data."""

    code: str = "santalo_error"

    def __init__(self, message: str, data: dict[str, Any] | None = None):
        super().__init__(message)
        self.message = message
        self.data = data or {}


class DomainError(SantaloError, ValueError):
    """Precondition violated (index out of range, dimension mismatch, ...)."""

    code = "domain_error"


class DegenerateBodyError(SantaloError):
    """A full-dimensional body was required but the input is flat."""

    code = "degenerate_body"


class UnboundedBodyError(SantaloError):
    code = "unbounded_body"


class DivergenceError(SantaloError):
    code = "divergence"


class NonMonotoneRhoError(DomainError):
    code = "non_monotone_rho"


class BlockedParameterError(DomainError):
    """Parameter combination the toolkit refuses to run (j = 1 campaigns)."""

    code = "blocked_parameter"
