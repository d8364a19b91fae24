# app/operations/numerics.py

"""
Module: numerics.py

Distribution functions and 2x2 algebra used by every statistical module.

Functions:
- normal_cdf(x) -> float
- normal_quantile(prob) -> float: inverse of normal_cdf, absolute error < 1e-9.
- chisq_sf(x, df) -> float: survival function for 1 or 2 degrees of freedom.
- chisq_isf(alpha, df) -> float: critical value with chisq_sf(value, df) = alpha.
- quadratic_form(v, M) -> float: v M⁻¹ v′ for a 2x2 matrix.
"""

import math
from typing import Sequence

from app.exceptions import DomainError, SingularMatrixError
from app.schemas.variance import Matrix2

SINGULAR_TOLERANCE = 1e-14

# Acklam's rational approximation to the normal quantile
_A = (-3.969683028665376e01, 2.209460984245205e02, -2.759285104469687e02,
      1.383577518672690e02, -3.066479806614716e01, 2.506628277459239e00)
_B = (-5.447609879822406e01, 1.615858368580409e02, -1.556989798598866e02,
      6.680131188771972e01, -1.328068155288572e01)
_C = (-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e00,
      -2.549732539343734e00, 4.374664141464968e00, 2.938163982698783e00)
_D = (7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e00,
      3.754408661907416e00)
_P_LOW = 0.02425


def normal_cdf(x: float) -> float:
    return 0.5 * math.erfc(-x / math.sqrt(2.0))


def normal_pdf(x: float) -> float:
    return math.exp(-0.5 * x * x) / math.sqrt(2.0 * math.pi)


def _rational_quantile(p: float) -> float:
    if p < _P_LOW:
        q = math.sqrt(-2.0 * math.log(p))
        return ((((((_C[0] * q + _C[1]) * q + _C[2]) * q + _C[3]) * q + _C[4]) * q + _C[5])
                / ((((_D[0] * q + _D[1]) * q + _D[2]) * q + _D[3]) * q + 1.0))
    if p > 1.0 - _P_LOW:
        return -_rational_quantile(1.0 - p)
    q = p - 0.5
    r = q * q
    return ((((((_A[0] * r + _A[1]) * r + _A[2]) * r + _A[3]) * r + _A[4]) * r + _A[5]) * q
            / (((((_B[0] * r + _B[1]) * r + _B[2]) * r + _B[3]) * r + _B[4]) * r + 1.0))


def normal_quantile(prob: float) -> float:
    """
    Return z with Φ(z) = prob.

    The rational approximation (relative error ~1e-9) is refined by one Newton
    step against the erfc-based CDF.

    Raises:
    - DomainError: if prob is not strictly between 0 and 1.

    Example:
    >>> round(normal_quantile(0.975), 6)
    1.959964
    """
    if not 0.0 < prob < 1.0:
        raise DomainError(f"normal_quantile requires 0 < prob < 1, got {prob!r}")
    if prob == 0.5:
        return 0.0
    z = _rational_quantile(prob)
    # upper tail refined through the complementary probability to avoid cancellation
    if prob > 0.5:
        error = 0.5 * math.erfc(z / math.sqrt(2.0)) - (1.0 - prob)
        return z + error / normal_pdf(z)
    error = normal_cdf(z) - prob
    return z - error / normal_pdf(z)


def chisq_sf(x: float, df: int) -> float:
    """Survival function P(X > x) of a chi-square variable with 1 or 2 df."""
    if df not in (1, 2):
        raise DomainError(f"chisq_sf supports df 1 or 2, got {df!r}")
    if x < 0 or math.isnan(x):
        raise DomainError(f"chisq_sf requires x >= 0, got {x!r}")
    if df == 2:
        return math.exp(-x / 2.0)
    # 2(1 - Φ(√x))
    return math.erfc(math.sqrt(x / 2.0))


def chisq_isf(alpha: float, df: int) -> float:
    """Critical value χ²_{df,α}: the (1-α)-percentile."""
    if df not in (1, 2):
        raise DomainError(f"chisq_isf supports df 1 or 2, got {df!r}")
    if not 0.0 < alpha < 1.0:
        raise DomainError(f"chisq_isf requires 0 < alpha < 1, got {alpha!r}")
    if df == 2:
        return -2.0 * math.log(alpha)
    z = normal_quantile(1.0 - alpha / 2.0)
    return z * z


def quadratic_form_values(v1, v2, a11, a12, a22):
    """v M⁻¹ v′ through the closed-form inverse; elementwise on numpy arrays, no singularity check."""
    det = a11 * a22 - a12 * a12
    return (v1 * v1 * a22 - 2.0 * v1 * v2 * a12 + v2 * v2 * a11) / det


def quadratic_form(v: Sequence[float], M: Matrix2) -> float:
    """
    Return v M⁻¹ v′ for a 2-vector and a symmetric 2x2 matrix.

    Raises:
    - SingularMatrixError: if M is not positive definite, i.e. a11 <= 0 or
      det(M) <= 1e-14 * |a11 a22|.
    """
    if len(v) != 2:
        raise DomainError(f"quadratic_form expects a 2-vector, got length {len(v)}")
    if not M.is_symmetric:
        raise DomainError("quadratic_form expects a symmetric matrix")
    det = M.det
    if not (M.a11 > 0 and det > SINGULAR_TOLERANCE * abs(M.a11 * M.a22)):
        raise SingularMatrixError(det, SINGULAR_TOLERANCE)
    return float(quadratic_form_values(v[0], v[1], M.a11, M.a12, M.a22))
