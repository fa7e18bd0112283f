"""Exception hierarchy shared by every module.

The CLI maps :class:`DomainError` (and subclasses) to exit status 2 and
:class:`ConvergenceError` to exit status 3.
"""

from __future__ import annotations


class SlcError(Exception):
    """Base class for all library errors."""


class DomainError(SlcError, ValueError):
    """An argument lies outside the domain where the operation is defined."""


class ConfigurationError(DomainError):
    """Malformed or unsupported configuration (dimension, keys, types)."""


class NotStrictlyConvexError(DomainError):
    """A shape operator that should be positive definite is not."""

    def __init__(self, message: str, node: int | tuple | None = None):
        super().__init__(message)
        self.node = node


class NotImmersedError(DomainError):
    """Finite-difference frame is degenerate at the requested node."""


class FlowSingularityError(DomainError):
    """Normal flow of a shape operator blows up before the requested distance."""

    def __init__(self, message: str, critical_distance: float):
        super().__init__(message)
        self.critical_distance = critical_distance


class PreconditionError(DomainError):
    """A caller-asserted hypothesis failed numerical verification."""


class NotHyperbolicTypeError(DomainError):
    """Spherical domain is of elliptic or parabolic type."""


class ConvergenceError(SlcError, RuntimeError):
    """An iterative solver stopped without meeting its tolerance."""

    def __init__(self, message: str, report=None):
        super().__init__(message)
        self.report = report
