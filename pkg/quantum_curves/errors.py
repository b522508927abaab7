"""
Error types for quantum-curves

Every library error is a ValueError subclass so callers can catch one type;
internal consistency guards derive from RuntimeError instead.
"""

from typing import Optional


class QuantumCurveError(ValueError):
    """Base class for user-facing errors."""


class ExpressionSyntaxError(QuantumCurveError):
    """
    Malformed curve or operator expression.

    Attributes:
        offset: 0-based character offset of the failure in the input text
        text: the input that failed to parse
    """

    def __init__(self, message: str, offset: int, text: str = ""):
        self.offset = offset
        self.text = text
        super().__init__(f"syntax error at offset {offset}: {message}")


class CurveError(QuantumCurveError):
    """The spectral curve violates a requirement of the recursion."""


class GuardError(QuantumCurveError):
    """An argument is outside the documented limits."""


class CheckFailure(QuantumCurveError):
    """
    An identity that should hold exactly produced a nonzero residual.

    Attributes:
        residual: printed form of the first nonzero residual
    """

    def __init__(self, message: str, residual: Optional[str] = None):
        self.residual = residual
        if residual is not None:
            message = f"{message}; residual = {residual}"
        super().__init__(message)


class PrecisionError(RuntimeError):
    """A truncated series was asked for a coefficient it does not know."""


class SymmetryError(RuntimeError):
    """Two evaluations of the same symmetric coefficient disagree."""
