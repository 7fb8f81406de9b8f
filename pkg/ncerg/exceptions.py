"""
ncerg Custom Exceptions
"""

from typing import Any, Optional, Sequence


class NCERGError(Exception):
    """Base exception for all ncerg errors."""
    pass


class ShapeMismatchError(NCERGError):
    """Raised when operators or maps live on different algebra shapes."""
    pass


class NotSelfAdjointError(NCERGError):
    """Raised when an operation needs a self-adjoint operator and gets another."""
    pass


class NotProjectionError(NCERGError):
    """Raised when a lattice operation receives something that is not a projection."""
    pass


class InvalidWindowError(NCERGError):
    """Raised when a spectral window (lo, hi] is empty or reversed."""
    pass


class InvalidParameterError(NCERGError, ValueError):
    """Raised when a numeric argument is outside its admissible range."""
    pass


class InvalidDescriptorError(NCERGError):
    """Raised when a norm descriptor is malformed or was never validated."""
    pass


class InvalidOrliczError(InvalidDescriptorError):
    """Raised when an Orlicz function fails validation."""
    pass


class InvalidPhiError(InvalidDescriptorError):
    """Raised when a concave function fails validation."""
    pass


class FamilySpecError(NCERGError):
    """Raised when a semigroup family or map specification is invalid."""
    pass


class NonCommutingError(NCERGError):
    """Raised when two generators of a multiparameter semigroup do not commute."""

    def __init__(self, i: int, j: int, residual: float):
        self.i = i
        self.j = j
        self.residual = residual
        super().__init__(
            f"Generators {i} and {j} do not commute: ||[L_{i}, L_{j}]|| = {residual:.3e}"
        )


class SpotcheckFailedError(NCERGError):
    """Raised when T_u fails Dunford-Schwartz certification at a spot-check point."""

    def __init__(self, u: Sequence[float], certificate: Any):
        self.u = tuple(float(v) for v in u)
        self.certificate = certificate
        super().__init__(f"T_u is not certified DS+ at u={self.u}: {certificate}")


class BruteForceTooLargeError(NCERGError):
    """Raised when exhaustive projection search is requested on too large an algebra."""
    pass


class ExperimentError(NCERGError):
    """Raised when an experiment cannot be dispatched."""
    pass


class ScenarioError(NCERGError):
    """Raised when a scenario file cannot be parsed or validated."""

    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class LiteralParseError(NCERGError):
    """Raised when an operator, step-function or descriptor literal cannot be parsed."""
    pass
