"""Exception types shared across the package."""


class DimerBfzError(Exception):
    """Base class for all errors raised by this package."""


class ValidationError(DimerBfzError):
    """Invalid input data (bad matrix, non-reduced word, malformed quiver...)."""


class UnsupportedDiagramError(ValidationError):
    """Dynkin graph outside the supported class (e.g. contains a cycle)."""


class CapError(DimerBfzError):
    """A resource or length cap was exceeded."""


class ReplayError(DimerBfzError):
    """A certificate failed exact replay; indicates an internal inconsistency."""
