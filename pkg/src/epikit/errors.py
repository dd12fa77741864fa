"""Exception types raised by epikit."""


class EpikitError(Exception):
    """Base class for all epikit errors."""


class DomainError(EpikitError, ValueError):
    """An argument lies outside the domain where a formula or model is defined."""


class NoEpidemicError(DomainError):
    """Raised when r0 * S0 <= 1, so the infection never grows."""


class ConfigError(EpikitError, ValueError):
    """Invalid integrator or command configuration."""


class EventNotFound(EpikitError, LookupError):
    """The requested event does not occur within the trajectory."""


class ConvergenceError(EpikitError, RuntimeError):
    """An iterative solver exhausted its iteration budget."""


class QuadratureError(EpikitError, RuntimeError):
    """Adaptive quadrature could not reach the requested tolerance."""
