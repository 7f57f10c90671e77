"""Exception and warning types raised by the numerical routines."""


class CylSpdcError(Exception):
    """Base class for all package errors."""


class DomainError(CylSpdcError, ValueError):
    """An argument lies outside the domain where the routine is defined."""


class SingularityError(DomainError):
    """Evaluation at a singular point (e.g. a Hankel function at zero)."""


class CapabilityError(CylSpdcError):
    """The request exceeds a configured capability such as the maximum order."""


class NearModeError(CylSpdcError):
    """The secular matrix is numerically singular because (m, q, w) sits on a mode."""

    def __init__(self, message, det):
        super().__init__(message)
        self.det = det


class AccuracyError(CylSpdcError):
    """A root search or quadrature did not converge to the requested accuracy."""


class DegenerateModeError(CylSpdcError):
    """A mode carries zero power flux, so the efficiency normalisation breaks down."""


class UnsupportedError(CylSpdcError, NotImplementedError):
    """The configuration is outside what the implementation supports."""


class ReducedAccuracyWarning(UserWarning):
    """The result was computed with a fallback scheme and is less accurate."""
