"""Exception hierarchy shared across the toolkit.

Everything raised on purpose derives from MetriqError so callers (and the
command line front end) can distinguish expected numerical failures from
genuine bugs.
"""


class MetriqError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(MetriqError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class PoleError(DomainError):
    """Evaluation requested exactly at a pole."""


class RangeOverflow(MetriqError, OverflowError):
    """The result is finite mathematically but exceeds double range."""


class ConvergenceError(MetriqError, ArithmeticError):
    """An iterative computation failed to reach its tolerance."""


class ToleranceNotMet(ConvergenceError):
    """Adaptive quadrature exhausted its subdivision budget.

    The best error estimate reached is kept in ``achieved``.
    """

    def __init__(self, message: str, achieved: float):
        super().__init__(f"{message} (achieved estimate {achieved:.3e})")
        self.achieved = achieved


class SeriesBlowup(MetriqError, ArithmeticError):
    """A series operation exceeded the hard term cap."""


class ParseError(MetriqError, ValueError):
    """Malformed expression or series literal.

    ``offset`` is the byte offset into the source at which parsing failed.
    """

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (byte offset {offset})")
        self.offset = offset


class ConfigError(MetriqError, ValueError):
    """Invalid parameter combination, step size, or harness configuration."""
