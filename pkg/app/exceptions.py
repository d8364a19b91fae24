# app/exceptions.py

"""
Error hierarchy for predictive-value inference.

Every error is a ValueError so callers that only know the standard library
contract keep working; the CLI catches PredictiveValueError and turns it into
a nonzero exit code with the message below.
"""

from typing import Optional


class PredictiveValueError(ValueError):
    """Base class for every domain error raised by the package."""


class EmptyMarginError(PredictiveValueError):
    """A diagnostic margin is empty, so its predictive value is undefined."""

    def __init__(self, which: str):
        self.which = which
        super().__init__(f"Empty diagnostic margin {which}: the corresponding predictive value is undefined")


class ZeroPredictiveValueError(PredictiveValueError):
    """A predictive value is zero, so the ratio scale is undefined."""

    def __init__(self, which: str):
        self.which = which
        super().__init__(
            f"Predictive value {which} is zero: ratio-scale inference is undefined "
            f"(rerun with --zero-sub to replace empty cells by 0.05)"
        )


class ZeroVarianceError(PredictiveValueError):
    def __init__(self, quantity: str, value: float):
        self.quantity = quantity
        self.value = value
        super().__init__(f"Variance {quantity} = {value!r} is not positive: the statistic is undefined")


class SingularMatrixError(PredictiveValueError):
    def __init__(self, det: float, tolerance: float):
        self.det = det
        self.tolerance = tolerance
        super().__init__(
            f"Covariance matrix is singular or not positive definite (det={det!r}, relative tolerance {tolerance:g}): "
            f"the global statistic is undefined for this table"
        )


class DomainError(PredictiveValueError):
    """Argument outside the domain of a numerical function."""


class InvalidMarginError(PredictiveValueError):
    """Non-inferiority or sample-size margin outside its admissible range."""


class InvalidMethodError(PredictiveValueError):
    def __init__(self, method: str, detail: Optional[str] = None):
        self.method = method
        message = f"Unsupported inference method: {method}"
        if detail:
            message = f"{message} ({detail})"
        super().__init__(message)


class InfeasibleScenarioError(PredictiveValueError):
    def __init__(self, constraint: str):
        self.constraint = constraint
        super().__init__(f"Infeasible scenario: {constraint}")


class ParseError(PredictiveValueError):
    def __init__(self, source: str, detail: str, line: Optional[int] = None, field: Optional[str] = None):
        self.source = source
        self.line = line
        self.field = field
        location = source
        if line is not None:
            location = f"{location}, line {line}"
        if field is not None:
            location = f"{location}, field {field}"
        super().__init__(f"Cannot parse {location}: {detail}")
