"""Exception hierarchy shared by the fitting, simulation and CLI layers."""


class QSplineError(Exception):
    """Base class for every error raised by this package."""


class InvalidInputError(QSplineError, ValueError):
    """Malformed configuration, non-finite data or out-of-range parameters."""


class DomainError(InvalidInputError):
    """Evaluation point outside the spline domain."""


class NumericalError(QSplineError, ArithmeticError):
    """A numerical routine could not produce a result.

    ``interval`` names the spline interval being processed, when known.
    """

    def __init__(self, message, interval=None):
        if interval is not None:
            message = f"interval {interval}: {message}"
        super().__init__(message)
        self.interval = interval


class SingularSystemError(NumericalError):
    pass


class PrecisionError(NumericalError):
    """Eigenphase does not fit the clock register."""


class PostSelectionError(NumericalError):
    pass
