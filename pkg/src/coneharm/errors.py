"""Exception types shared across the package."""


class ConeHarmError(Exception):
    """Base class for all package-specific errors."""


class DomainError(ConeHarmError, ValueError):
    """An evaluation point lies outside the supported domain."""


class ConfigurationError(ConeHarmError, ValueError):
    """Inconsistent or invalid construction parameters / experiment config."""


class ValidationError(ConeHarmError, ValueError):
    """Input data violates a documented invariant."""


class CapabilityError(ConeHarmError, RuntimeError):
    """The requested operation is not supported by this object kind."""


class NumericalError(ConeHarmError, RuntimeError):
    """An adaptive numerical routine failed to converge."""


class RegimeMismatchWarning(UserWarning):
    """A growth bound is evaluated outside its curvature regime of validity."""
