"""Exception hierarchy shared across the package.

``DomainError`` covers invalid inputs (CLI exit code 1) and
``NumericalError`` covers solver failures (CLI exit code 2).
"""


class ConsensusModelError(Exception):
    """Base class for all package errors."""


class DomainError(ConsensusModelError, ValueError):
    """An argument lies outside the domain of the operation."""


class ConfigError(DomainError):
    """A configuration file is malformed or fails validation."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class DegenerateSeriesError(DomainError):
    """A gain series carries no shape information (e.g. all values equal)."""


class NumericalError(ConsensusModelError, ArithmeticError):
    """A numerical kernel failed to produce a trustworthy result."""


class BracketError(NumericalError):
    """The objective does not change sign on the supplied bracket."""


class ConvergenceError(NumericalError):
    """An iterative method stopped before meeting its tolerance.

    ``best`` holds the best iterate found, when one exists.
    """

    def __init__(self, message, best=None):
        super().__init__(message)
        self.best = best
