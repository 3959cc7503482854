"""
Error hierarchy shared by every benchmark module
"""
from typing import Optional


class BenchError(Exception):
    """Base class for all benchmark errors."""


class GeometryError(BenchError, ValueError):
    pass


class NonConformingSpacing(GeometryError):
    pass


class SeparationUnsatisfiable(GeometryError):
    pass


class DegenerateCloud(GeometryError):
    pass


class NotOnBoundary(GeometryError):
    pass


class NormalAmbiguous(GeometryError):
    pass


class FemError(BenchError, ValueError):
    pass


class UnsupportedDegree(FemError):
    pass


class OutsideReferenceElement(FemError):
    pass


class PinNodeNotFound(FemError):
    pass


class RbfError(BenchError, ValueError):
    pass


class SingularDerivative(RbfError):
    pass


class MissingPressureClosure(RbfError):
    pass


class NumericalError(BenchError, ArithmeticError):
    pass


class EmptyMatrix(NumericalError):
    pass


class ShapeMismatch(NumericalError):
    pass


class AllSolvesFailed(NumericalError):
    pass


class UncoveredDomain(NumericalError):
    pass


class MetricsError(BenchError, ValueError):
    pass


class LengthMismatch(MetricsError):
    pass


class CaseError(BenchError, ValueError):
    pass


class OutsideDomain(CaseError):
    pass


class InvalidCase(CaseError):
    pass


class ConfigParseError(CaseError):
    """Suite configuration could not be parsed; carries the offending line or case."""

    def __init__(self, message: str, lineno: Optional[int] = None, case_index: Optional[int] = None):
        if case_index is not None:
            message = f"case {case_index}: {message}"
        if lineno is not None:
            message = f"{message} (line {lineno})"
        super().__init__(message)
        self.lineno = lineno
        self.case_index = case_index


class TrendError(BenchError, ValueError):
    pass


class InsufficientPoints(TrendError):
    pass


class NonPositiveValue(TrendError):
    pass
