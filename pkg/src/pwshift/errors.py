"""Exception hierarchy shared by the numerical modules and the CLI."""


class PwshiftError(Exception):
    """Base class for all errors raised by pwshift."""


class ConfigError(PwshiftError):
    """Invalid or missing run configuration (CLI exit code 2)."""


class NumericError(PwshiftError, ArithmeticError):
    """A numerical routine could not deliver a certified result (CLI exit code 3)."""


class DomainError(NumericError, ValueError):
    """Argument outside the mathematical domain of the function."""


class RangeError(NumericError):
    """Result would overflow or cannot be certified to the target accuracy."""


class ConvergenceError(NumericError):
    """Iterative refinement (quadrature, continued fraction) failed to converge."""
