"""Exception hierarchy.

The CLI maps :class:`ValidationError` to exit code 3 and
:class:`ComputationError` to exit code 4.
"""


class MwphaseError(Exception):
    """Base class for all package errors."""


class ValidationError(MwphaseError, ValueError):
    """An input violates a documented precondition."""


class ComputationError(MwphaseError, ArithmeticError):
    """A numerical evaluation failed or left its trusted regime."""


class InvalidElementError(ValidationError):
    """A network element was given a non-finite or otherwise unusable value."""


class SingularNetworkError(ComputationError):
    """ABCD to S conversion hit a vanishing denominator."""


class DivergentInductanceError(ComputationError):
    """Josephson inductance evaluated at a half-integer flux."""


class InfeasibleInductanceError(ValidationError):
    """Requested inductance lies below the SQUID minimum."""

    def __init__(self, message: str, lmin: float):
        super().__init__(message)
        self.lmin = lmin


class DegenerateDesignError(ComputationError):
    """The design formula has a vanishing denominator."""


class NoCurveError(ComputationError):
    """No feasible phase interval exists for the device."""


class NonInvertibleError(ComputationError):
    """Inductance matrix singular or too ill-conditioned to invert."""

    def __init__(self, message: str, condition: float):
        super().__init__(message)
        self.condition = condition


class CalibrationError(ComputationError):
    """Coupling calibration did not reach the requested residual."""

    def __init__(self, message: str, residual: float):
        super().__init__(message)
        self.residual = residual


class BoundaryContaminationError(ComputationError):
    """Probability reached the lattice edges during an evolution."""

    def __init__(self, message: str, edge_norm: float):
        super().__init__(message)
        self.edge_norm = edge_norm


class UndefinedDensityError(ComputationError):
    """Reference envelope too small to define a normalized density."""
