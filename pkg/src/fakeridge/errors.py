"""Exception hierarchy.

Configuration problems derive from ``ConfigError`` (and ``ValueError``) so the
CLI can map them to exit code 2; numerical failures derive from
``NumericalError``.
"""


class FakeRidgeError(Exception):
    """Base class for all package errors."""


class ConfigError(FakeRidgeError, ValueError):
    """Invalid configuration or violated precondition."""


class DimensionError(ConfigError):
    """Shapes or dimension counts are inconsistent."""


class PowerError(ConfigError):
    """Signal power assigned to an empty feature block."""


class NegativeParameterError(ConfigError):
    """A parameter that must be non-negative is negative (or non-finite)."""


class LambdaZeroError(ConfigError):
    """The bound requires a strictly positive ridge parameter."""


class NumericalError(FakeRidgeError, ArithmeticError):
    """Base class for numerical failures."""


class SolveError(NumericalError):
    """The shifted Gram matrix could not be factorized."""


class ConvergenceError(NumericalError):
    """The singular value decomposition did not converge."""
