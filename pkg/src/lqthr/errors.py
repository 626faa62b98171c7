"""Exception hierarchy shared by all lqthr modules."""


class LqthrError(Exception):
    """Base class for every error raised by lqthr."""


class DomainError(LqthrError, ValueError):
    """An argument lies outside the domain where the quantity is defined."""


class ConfigurationError(LqthrError, ValueError):
    """Invalid quadrature or run configuration."""


class UnboundedObjectiveError(LqthrError, ValueError):
    """The scalar maximization has no finite maximum (gamma <= 0)."""


class OptimizationFailure(LqthrError, RuntimeError):
    """Dual minimization diverged from every start."""


class RangeError(LqthrError, ValueError):
    """A requested curve value is not achievable for this kind and exponent."""


class DegenerateInstanceError(LqthrError, ValueError):
    """The measurement matrix does not have full row rank."""
