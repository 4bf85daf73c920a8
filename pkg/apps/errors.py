"""Exception hierarchy shared by the worker modules and the CLI"""


class StabilityError(Exception):
    """Base class for every error raised by this package"""


class ArgumentError(StabilityError, ValueError):
    """Malformed arguments: wrong dimension, wrong kernel family, bad flags"""


class DomainError(StabilityError, ValueError):
    """Parameters outside the model's domain (e.g. a²/4 < b)"""


class BracketError(StabilityError, ValueError):
    """Root bracket without a sign change"""


class ConvergenceError(StabilityError, RuntimeError):
    """Iteration budget exhausted"""


class PreconditionError(StabilityError, ValueError):
    """Operation called on an input that does not satisfy its precondition"""


class ConfigurationError(StabilityError, ValueError):
    """Invalid simulation or sweep configuration"""


class FitError(StabilityError, ValueError):
    """Growth-rate fit impossible on the requested window"""
