"""Exception hierarchy shared across the package."""

from __future__ import annotations


class RodeoError(Exception):
    """Base class for every error raised by this package."""


class InvalidInputError(RodeoError, ValueError):
    """An argument violates a documented precondition."""


class FitError(RodeoError):
    """A nonlinear fit failed to converge.

    ``diagnostics`` carries the last iterate, cost and iteration count.
    """

    def __init__(self, message: str, diagnostics: dict | None = None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class InsufficientDataError(RodeoError):
    """Too few data points for the requested fit."""


class PeakNotFoundError(RodeoError):
    """A scan stage produced no peak where one was required."""

    def __init__(self, message: str, scans: list | None = None):
        super().__init__(message)
        self.scans = scans or []


class ConfigError(RodeoError):
    """A run configuration is malformed or incomplete."""
