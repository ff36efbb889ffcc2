"""Exceptions raised by hsr_qos.

The command line maps them to exit codes, the API to HTTP status codes.
"""


class QosError(Exception):
    """Base class of all hsr_qos errors."""


class ScenarioError(QosError, ValueError):
    """Scenario file cannot be parsed or violates a parameter bound."""


class VelocityProfileError(QosError, ValueError):
    """Velocity input is malformed or outside its admissible range."""


class DomainError(QosError, ValueError):
    """Argument outside the domain of an operation (negative power, t off-cell)."""


class InfeasibleDemandError(QosError):
    """The requested rates lie outside the achievable region of the budget."""


class NumericsError(QosError):
    """Quadrature or root finding failed."""


class BracketError(NumericsError):
    """The function does not change sign on the bracket."""


class ConvergenceError(NumericsError):
    """An iterative solver reached its iteration cap."""

    def __init__(self, message: str, iterations: int, residual: float) -> None:
        super().__init__(message)
        self.iterations = iterations
        self.residual = residual
