# app/operations/bennett.py

"""
Module: bennett.py

Bennett-type statistics for H: P_A = P_B, written on the count scale.

With f = (p1+p2)(p5+p7) - (p1+p3)(p5+p6), the estimator f̂ = a/n² vanishes
exactly when P̂_A = P̂_B, and the delta method gives n·V(f̂) = F - M² with
F = Σ f_i² p_i and M = Σ f_i p_i = 2f. The three statistics differ in how
F and M are estimated:

- z_B²: F at the observed table, M = 0 (its value under H);
- z_B'²: F and M at the observed table;
- z_W²: as z_B'² with the multinomial constant 4 replaced by
  Π = 1/π̂ + 1/(1-π̂) - 1.

Estimating F and M entirely under H gives the pooled difference statistic
z²_{d(p)}; ``kosinski_equivalence_check`` verifies that numerically.
"""

import logging
import math

from app.exceptions import ZeroVarianceError
from app.operations.core import diagnosis_symmetry, predictive_values, validate_counts
from app.operations.inference import individual_test
from app.operations.variance import difference_variance, pooled_values
from app.schemas.bennett import BennettComponents, BennettStatistics
from app.schemas.counts import PairedCounts
from app.schemas.inference import MethodId, Target

logger = logging.getLogger(__name__)

CROSS_CHECK_TOLERANCE = 1e-10
EQUIVALENCE_TOLERANCE = 1e-9


def _oriented(counts: PairedCounts, target: Target) -> PairedCounts:
    validate_counts(counts)
    target = Target(target)
    if target == Target.GLOBAL:
        raise ValueError("Bennett statistics are defined per side: target must be positive or negative")
    return diagnosis_symmetry(counts) if target == Target.NEGATIVE else counts


def _kernel(c) -> tuple:
    a = (c.x1 + c.x2) * (c.x5 + c.x7) - (c.x1 + c.x3) * (c.x5 + c.x6)
    b0 = c.x1 * (c.x6 - c.x7) ** 2 + c.x2 * (c.x5 + c.x7) ** 2 + c.x3 * (c.x5 + c.x6) ** 2
    b1 = c.x7 * (c.x1 + c.x2) ** 2 + c.x6 * (c.x1 + c.x3) ** 2 + c.x5 * (c.x2 - c.x3) ** 2
    return a, b0, b1


def bennett_components(counts: PairedCounts, target: Target = Target.POSITIVE) -> BennettComponents:
    c = _oriented(counts, target)
    a, b0, b1 = _kernel(c)
    n = c.n
    return BennettComponents(
        a=a,
        b0=b0,
        b1=b1,
        M=2.0 * a / n ** 2,
        F=(b0 + b1) / n ** 3,
        pi_hat=c.diseased / n,
        n=n,
        target=Target(target),
    )


def _ratio(numerator: float, denominator: float, quantity: str) -> float:
    if not denominator > 0:
        raise ZeroVarianceError(quantity, denominator)
    return numerator / denominator


def _agree(x: float, y: float) -> bool:
    return math.isclose(x, y, rel_tol=CROSS_CHECK_TOLERANCE, abs_tol=1e-12)


def bennett_statistics(counts: PairedCounts, target: Target = Target.POSITIVE) -> BennettStatistics:
    """
    Return z_B², z_B'² and z_W² for the requested side.

    The count form is exported; the predictive-value form
    d̂² / {σ̂_d² + d̂²(1/n_A + 1/n_B - k/n)} is evaluated alongside and must agree.

    Raises:
        ZeroVarianceError: if a denominator is not positive.
    """
    parts = bennett_components(counts, target)
    a, b, n, pi_hat = parts.a, parts.b0 + parts.b1, parts.n, parts.pi_hat
    if not 0.0 < pi_hat < 1.0:
        raise ZeroVarianceError("pi_hat(1 - pi_hat)", pi_hat * (1.0 - pi_hat))
    wu_constant = 1.0 / pi_hat + 1.0 / (1.0 - pi_hat) - 1.0

    z_b = _ratio(a * a, b, "b0 + b1")
    z_bprime = _ratio(a * a, b - 4.0 * a * a / n, "b0 + b1 - 4a^2/n")
    z_w = _ratio(a * a, b - wu_constant * a * a / n, "b0 + b1 - Pi*a^2/n")

    c = _oriented(counts, target)
    pa, pb, _, _ = predictive_values(c)
    d_hat = pa - pb
    sigma_sq = difference_variance(c, pa, pb)
    inverse_margins = 1.0 / c.n_A + 1.0 / c.n_B
    predictive = (
        _ratio(d_hat ** 2, sigma_sq + d_hat ** 2 * inverse_margins, "z_B^2 denominator"),
        _ratio(d_hat ** 2, sigma_sq + d_hat ** 2 * (inverse_margins - 4.0 / n), "z_B'^2 denominator"),
        _ratio(d_hat ** 2, sigma_sq + d_hat ** 2 * (inverse_margins - wu_constant / n), "z_W^2 denominator"),
    )
    for label, count_form, value in zip(("z_B^2", "z_B'^2", "z_W^2"), (z_b, z_bprime, z_w), predictive):
        if not _agree(count_form, value):
            raise ArithmeticError(f"{label}: count form {count_form!r} disagrees with predictive form {value!r}")

    return BennettStatistics(z_B_sq=z_b, z_Bprime_sq=z_bprime, z_W_sq=z_w, target=Target(target))


def null_bennett_statistic(counts: PairedCounts, target: Target = Target.POSITIVE) -> float:
    """
    Bennett statistic with F estimated entirely under H: P_A = P_B = P̂ (M = 0).

    The partials f_i are evaluated at P̂ and the margin numerators x_A, x_B
    at their null expectations P̂·n_A, P̂·n_B; the cells x1 and x5 stay observed.
    """
    c = _oriented(counts, target)
    a, _, _ = _kernel(c)
    pa, pb, na, nb = predictive_values(c)
    p_hat, _ = pooled_values(c, pa, pb, na, nb)
    p_hat = float(p_hat)
    q_hat = 1.0 - p_hat
    n_a, n_b = c.n_A, c.n_B
    null_f = (
        p_hat * q_hat * n_a * n_b * (n_a + n_b)
        - 2.0 * n_a * n_b * (q_hat ** 2 * c.x1 + p_hat ** 2 * c.x5)
    )
    return _ratio(a * a, null_f, "null-estimated F")


def kosinski_equivalence_check(counts: PairedCounts, target: Target = Target.POSITIVE) -> bool:
    """True when the fully null-estimated Bennett statistic equals z²_{d(p)} within 1e-9 relative."""
    bennett = null_bennett_statistic(counts, target)
    pooled = individual_test(counts, MethodId.D_POOLED, target).statistic
    agree = math.isclose(bennett, pooled, rel_tol=EQUIVALENCE_TOLERANCE, abs_tol=1e-12)
    if not agree:
        logger.warning(f"Null-estimated Bennett statistic {bennett!r} differs from z^2_d(p) {pooled!r}")
    return agree
