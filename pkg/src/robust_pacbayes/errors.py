"""Exception types shared across the package."""


class RobustPBError(Exception):
    """Base class for all package errors."""


class DomainError(RobustPBError, ValueError):
    """An input lies outside the domain of a function (e.g. non-finite)."""


class ArgumentError(RobustPBError, ValueError):
    """An argument violates an operation's precondition."""


class ConfigurationError(RobustPBError, ValueError):
    """A configuration object holds invalid parameters."""


class CapabilityError(RobustPBError):
    """The requested quantity cannot be provided (missing ground truth, infinite moment)."""


class AssumptionViolation(RobustPBError):
    """A theoretical assumption required by a bound does not hold.

    The ``assumption`` attribute names the violated condition so the harness
    can surface it.
    """

    def __init__(self, assumption, message=None):
        self.assumption = assumption
        super().__init__(message or f"assumption violated: {assumption}")
