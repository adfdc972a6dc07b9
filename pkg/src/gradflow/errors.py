"""Exception types shared across the package."""


class GradflowError(Exception):
    """Base class for all package errors."""


class InvalidArgumentError(GradflowError, ValueError):
    """An argument is outside its documented range."""


class InvalidFrameError(GradflowError):
    """A state is in the wrong frame for the requested operation."""


class DomainTooSmallError(GradflowError):
    """A grid cannot hold the support of the field sampled onto it."""


class CflViolationError(GradflowError):
    """An explicit step was requested with dt above the stability bound."""


class DomainOverflowError(GradflowError):
    """The numerical support reached the outer boundary of the grid."""


class NotAHumpError(GradflowError):
    """The phase-plane orbit lacks the slope-zero/value-zero event pair."""


class InvalidWindowError(GradflowError):
    """A diagnostic needs a time window the series does not cover."""


class ConfigError(GradflowError):
    """A run-configuration entry is unknown or out of range."""
