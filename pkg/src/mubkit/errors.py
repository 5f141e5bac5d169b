"""Exception types raised across mubkit."""

from __future__ import annotations


class MubkitError(Exception):
    """Base class for all mubkit errors."""


class ShapeError(MubkitError, ValueError):
    """Matrix dimensions do not fit the requested operation."""


class ValidationError(MubkitError, ValueError):
    """Input violates a documented precondition or type invariant."""


class PreconditionError(ValidationError):
    """A named precondition failed.

    ``code`` is a short machine-readable identifier such as
    ``"d-proportional-to-identity"``.
    """

    def __init__(self, code: str, message: str | None = None):
        self.code = code
        super().__init__(f"{code}: {message}" if message else code)


class ConvergenceError(MubkitError, RuntimeError):
    """An iterative routine exhausted its budget.

    The best iterate found so far is attached as ``best`` (may be None).
    """

    def __init__(self, message: str, best=None):
        super().__init__(message)
        self.best = best


class ParseError(MubkitError, ValueError):
    """A matrix file could not be parsed."""
