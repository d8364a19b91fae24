# app/operations/inference.py

"""
Module: inference.py

User-facing inferences on one paired table: confidence intervals, individual
(df 1) and global (df 2) homogeneity tests, non-inferiority tests and
confidence-region membership.

Every operation follows the same recipe:

- the adjusted "(a)" variants recompute everything from the table plus 0.5;
- the negative side is the positive side of the diagnosis-symmetric table;
- the pooled "(p)" variants keep the unpooled point estimates and evaluate
  the variances (and, for global tests, the covariance) at the pooled values.
"""

import logging
from typing import Sequence, Tuple

from app.exceptions import InvalidMarginError, InvalidMethodError, ZeroVarianceError
from app.operations.core import adjust_half, diagnosis_symmetry, predictive_values, validate_counts
from app.operations.method_factory import InferenceStrategy, MethodFactory
from app.operations.numerics import (
    chisq_isf,
    chisq_sf,
    normal_cdf,
    normal_quantile,
    quadratic_form,
)
from app.operations.variance import (
    check_ratio_scale,
    difference_covariance,
    pooled_covariance,
    pooled_values,
    ratio_covariance,
)
from app.schemas.counts import PairedCounts
from app.schemas.inference import (
    Family,
    Interval,
    MethodId,
    NonInferiorityResult,
    Target,
    TestResult,
    Variant,
)

logger = logging.getLogger(__name__)


def _working_table(counts: PairedCounts, method: MethodId, target: Target) -> PairedCounts:
    """Table on which the positive-side formulas give the requested inference."""
    working = adjust_half(counts) if method.variant == Variant.ADJUSTED else counts
    validate_counts(working)
    if target == Target.NEGATIVE:
        working = diagnosis_symmetry(working)
    if method.family != Family.DIFFERENCE:
        check_ratio_scale(working, Target.GLOBAL if target == Target.GLOBAL else Target.POSITIVE)
    return working


def _side_inputs(working: PairedCounts, method: MethodId, strategy: InferenceStrategy) -> Tuple[float, float]:
    """(point estimate, variance) of the positive side of ``working``."""
    pa, pb, na, nb = predictive_values(working)
    if method.variant == Variant.POOLED:
        p_hat, _ = pooled_values(working, pa, pb, na, nb)
        p_hat = float(p_hat)
        variance = float(strategy.variance(working, p_hat, p_hat))
    else:
        variance = float(strategy.variance(working, pa, pb))
    return float(strategy.point(pa, pb)), variance


def _variance_name(method: MethodId, target: Target) -> str:
    base = "sigma_d" if method.family == Family.DIFFERENCE else "sigma_R"
    bar = "bar" if target == Target.NEGATIVE else ""
    return f"{base}{bar}^2[{method.value}]"


def _require_target(target: Target) -> Target:
    target = Target(target)
    if target == Target.GLOBAL:
        raise InvalidMethodError("global", "individual inferences need target positive or negative")
    return target


def _require_interval_method(method: MethodId) -> None:
    if method.variant == Variant.POOLED:
        raise InvalidMethodError(method.value, "pooled variants define tests, not confidence intervals")


def confidence_interval(
    counts: PairedCounts,
    method,
    alpha: float = 0.05,
    target: Target = Target.POSITIVE,
) -> Interval:
    """
    Two-sided 100(1-α)% interval for d (d̄) or R (R̄) by any of the six CI methods.

    Raises:
        InvalidMethodError: for pooled methods.
        EmptyMarginError, ZeroPredictiveValueError: when the estimates are undefined.
    """
    method = MethodFactory.resolve(method)
    _require_interval_method(method)
    target = _require_target(target)
    strategy = MethodFactory.create_strategy(method.family)
    working = _working_table(counts, method, target)
    point, variance = _side_inputs(working, method, strategy)
    if variance < 0:
        raise ZeroVarianceError(_variance_name(method, target), variance)
    lower, upper = strategy.interval(point, variance, normal_quantile(1.0 - alpha / 2.0))
    return Interval(lower=float(lower), upper=float(upper), scale=strategy.scale)


def ci_difference(
    counts: PairedCounts,
    variant: Variant = Variant.CLASSIC,
    alpha: float = 0.05,
    target: Target = Target.POSITIVE,
) -> Interval:
    return confidence_interval(counts, MethodId.of(Family.DIFFERENCE, Variant(variant)), alpha, target)


def ci_ratio(
    counts: PairedCounts,
    method=MethodId.LR,
    alpha: float = 0.05,
    target: Target = Target.POSITIVE,
) -> Interval:
    method = MethodFactory.resolve(method)
    if method.family == Family.DIFFERENCE:
        raise InvalidMethodError(method.value, "ci_ratio needs a log-ratio or direct-ratio method")
    return confidence_interval(counts, method, alpha, target)


def _signed(counts: PairedCounts, method: MethodId, value: float, target: Target) -> float:
    strategy = MethodFactory.create_strategy(method.family)
    working = _working_table(counts, method, target)
    point, variance = _side_inputs(working, method, strategy)
    if not variance > 0:
        raise ZeroVarianceError(_variance_name(method, target), variance)
    return float(strategy.signed_statistic(point, variance, value))


def individual_test(
    counts: PairedCounts,
    method,
    target: Target = Target.POSITIVE,
) -> TestResult:
    """
    Homogeneity test of P_A = P_B (positive) or N_A = N_B (negative), df 1.

    Example:
    >>> weiner = PairedCounts.from_sequence([473, 81, 29, 25, 22, 44, 46, 151])
    >>> round(individual_test(weiner, "d").statistic, 3)
    0.802
    """
    method = MethodFactory.resolve(method)
    target = _require_target(target)
    strategy = MethodFactory.create_strategy(method.family)
    z = _signed(counts, method, strategy.null_value, target)
    statistic = z * z
    logger.debug(f"{method.value} {target.value}: statistic={statistic:.6g}")
    return TestResult(
        statistic=statistic,
        df=1,
        p_value=chisq_sf(statistic, 1),
        method=method,
        target=target,
    )


def shifted_statistic(
    counts: PairedCounts,
    method,
    margin: float,
    target: Target = Target.POSITIVE,
) -> float:
    """
    Two-sided statistic against a non-null value: z²_{d(δ)}, z²_{LR(ρ)} or z²_{R(ρ)}.

    Defined for the classic and adjusted variants.
    """
    method = MethodFactory.resolve(method)
    target = _require_target(target)
    if method.variant == Variant.POOLED:
        raise InvalidMethodError(method.value, "pooling is only defined under homogeneity")
    if method.family != Family.DIFFERENCE and not margin > 0:
        raise InvalidMarginError(f"ratio margin must be positive, got {margin!r}")
    z = _signed(counts, method, margin, target)
    return z * z


def noninferiority_test(
    counts: PairedCounts,
    method,
    margin: float,
    alpha: float = 0.05,
    target: Target = Target.POSITIVE,
) -> NonInferiorityResult:
    """
    One-sided test of H: d = δ (R = ρ) against K: d > δ (R > ρ).

    H is rejected, i.e. test A is declared not inferior to B by more than the
    margin, when the signed statistic exceeds the one-sided α-quantile.

    Raises:
        InvalidMarginError: unless δ < 0 (difference) or 0 < ρ < 1 (ratios).
        InvalidMethodError: for pooled methods.
    """
    method = MethodFactory.resolve(method)
    target = _require_target(target)
    strategy = MethodFactory.create_strategy(method.family)
    if not strategy.valid_margin(margin):
        bound = "delta < 0" if method.family == Family.DIFFERENCE else "0 < rho < 1"
        raise InvalidMarginError(f"non-inferiority margin must satisfy {bound}, got {margin!r}")
    if method.variant == Variant.POOLED:
        raise InvalidMethodError(method.value, "pooling is only defined under homogeneity")
    z = _signed(counts, method, margin, target)
    critical = normal_quantile(1.0 - alpha)
    statistic = z * z
    test = TestResult(statistic=statistic, df=1, p_value=chisq_sf(statistic, 1), method=method, target=target)
    return NonInferiorityResult(
        test=test,
        margin=margin,
        z=z,
        critical_value=critical,
        one_sided_p_value=normal_cdf(-z),
        alpha=alpha,
        reject=z > critical,
    )


def _region_inputs(counts: PairedCounts, method: MethodId):
    """Point estimates (positive, negative) and the family's covariance matrix."""
    strategy = MethodFactory.create_strategy(method.family)
    working = _working_table(counts, method, Target.GLOBAL)
    pa, pb, na, nb = predictive_values(working)
    if method.variant == Variant.POOLED:
        matrix = pooled_covariance(working, method.family)
    elif method.family == Family.DIFFERENCE:
        matrix = difference_covariance(working).matrix
    else:
        matrix = ratio_covariance(working).matrix
    return strategy, (float(strategy.point(pa, pb)), float(strategy.point(na, nb))), matrix


def _region_statistic(counts: PairedCounts, method: MethodId, point: Sequence[float]) -> float:
    strategy, estimate, matrix = _region_inputs(counts, method)
    vector = [float(strategy.displacement(estimate[i], point[i])) for i in range(2)]
    return quadratic_form(vector, matrix)


def global_test(counts: PairedCounts, method) -> TestResult:
    """
    Joint homogeneity test of P_A = P_B and N_A = N_B, df 2.

    Raises:
        SingularMatrixError: if the family's covariance matrix is not positive definite.
    """
    method = MethodFactory.resolve(method)
    strategy = MethodFactory.strategy_for(method)
    null = strategy.null_value
    statistic = _region_statistic(counts, method, (null, null))
    if statistic < 0:
        # only rounding can do this once the matrix is positive definite
        logger.debug(f"{method.value} global: rounding residue {statistic!r} set to 0")
        statistic = 0.0
    return TestResult(
        statistic=statistic,
        df=2,
        p_value=chisq_sf(statistic, 2),
        method=method,
        target=Target.GLOBAL,
    )


def confidence_region_contains(
    counts: PairedCounts,
    point: Sequence[float],
    method=MethodId.D,
    alpha: float = 0.05,
) -> bool:
    """Whether (d, d̄) (or (R, R̄)) lies in the 100(1-α)% joint confidence region."""
    method = MethodFactory.resolve(method)
    if len(point) != 2:
        raise ValueError(f"Expected a pair of values, got {len(point)}")
    if method.family != Family.DIFFERENCE and min(point) <= 0:
        raise InvalidMarginError(f"ratio-scale points must be positive, got {tuple(point)}")
    return _region_statistic(counts, method, point) <= chisq_isf(alpha, 2)


def ratio_scale_covariance(counts: PairedCounts) -> float:
    """Cov(R̂, R̄̂) on the direct ratio scale, σ̂_RR̄ · R̂ · R̄̂."""
    _, estimate, matrix = _region_inputs(counts, MethodId.R)
    return matrix.a12 * estimate[0] * estimate[1]
