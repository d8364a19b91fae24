# tests/unit/test_inference.py

import math

import pytest

from app.exceptions import (
    EmptyMarginError,
    InvalidMarginError,
    InvalidMethodError,
    SingularMatrixError,
    ZeroPredictiveValueError,
    ZeroVarianceError,
)
from app.operations.core import diagnosis_symmetry, estimates, test_symmetry
from app.operations.inference import (
    ci_difference,
    ci_ratio,
    confidence_interval,
    confidence_region_contains,
    global_test,
    individual_test,
    noninferiority_test,
    ratio_scale_covariance,
    shifted_statistic,
)
from app.operations.numerics import chisq_isf, normal_quantile, quadratic_form
from app.operations.variance import pooled_covariance, ratio_covariance
from app.schemas.counts import PairedCounts
from app.schemas.inference import CI_METHODS, Family, MethodId, Target, Variant

ALL_METHODS = list(MethodId)
SIDES = [Target.POSITIVE, Target.NEGATIVE]


# ---------------------------------------------
# Confidence intervals
# ---------------------------------------------

@pytest.mark.parametrize("method", CI_METHODS, ids=[m.value for m in CI_METHODS])
@pytest.mark.parametrize("target", SIDES, ids=["positive", "negative"])
def test_interval_endpoints_invert_the_shifted_statistic(weiner, method, target):
    """Each endpoint is a value at which the two-sided statistic equals z²."""
    interval = confidence_interval(weiner, method, 0.05, target)
    z_sq = normal_quantile(0.975) ** 2
    for endpoint in (interval.lower, interval.upper):
        assert shifted_statistic(weiner, method, endpoint, target) == pytest.approx(z_sq, rel=1e-9)


@pytest.mark.parametrize("method", CI_METHODS, ids=[m.value for m in CI_METHODS])
def test_interval_contains_the_estimate(weiner, method):
    interval = confidence_interval(weiner, method)
    estimate = 554 / 620 - 502 / 570 if method.family == Family.DIFFERENCE else (554 / 620) / (502 / 570)
    if method.variant == Variant.CLASSIC:
        assert interval.contains(estimate)
    assert interval.scale == ("difference" if method.family == Family.DIFFERENCE else "ratio")


def test_interval_narrows_with_alpha(weiner):
    wide = confidence_interval(weiner, "d", alpha=0.01)
    narrow = confidence_interval(weiner, "d", alpha=0.10)
    assert wide.width > narrow.width
    assert wide.lower < narrow.lower < narrow.upper < wide.upper


def test_interval_under_test_symmetry(many_random_tables):
    for counts in many_random_tables:
        swapped = test_symmetry(counts)
        for method in CI_METHODS:
            original = confidence_interval(counts, method)
            mirrored = confidence_interval(swapped, method)
            if method.family == Family.DIFFERENCE:
                assert mirrored.lower == pytest.approx(-original.upper, rel=1e-9, abs=1e-12)
                assert mirrored.upper == pytest.approx(-original.lower, rel=1e-9, abs=1e-12)
            else:
                assert mirrored.lower == pytest.approx(1 / original.upper, rel=1e-9)
                assert mirrored.upper == pytest.approx(1 / original.lower, rel=1e-9)


def test_negative_interval_is_positive_interval_of_mirrored_table(random_tables):
    for counts in random_tables:
        for method in CI_METHODS:
            negative = confidence_interval(counts, method, target=Target.NEGATIVE)
            positive = confidence_interval(diagnosis_symmetry(counts), method, target=Target.POSITIVE)
            assert negative.lower == pytest.approx(positive.lower, rel=1e-12, abs=1e-15)
            assert negative.upper == pytest.approx(positive.upper, rel=1e-12, abs=1e-15)


def test_degenerate_table_gives_zero_width_interval():
    counts = PairedCounts.from_sequence([5, 0, 0, 0, 0, 0, 0, 5])
    for target in SIDES:
        difference = ci_difference(counts, target=target)
        assert (difference.lower, difference.upper) == (0.0, 0.0)
        ratio = ci_ratio(counts, "LR", target=target)
        assert (ratio.lower, ratio.upper) == (1.0, 1.0)


def test_pooled_methods_define_no_interval(weiner):
    with pytest.raises(InvalidMethodError):
        confidence_interval(weiner, "d(p)")


def test_interval_rejects_global_target(weiner):
    with pytest.raises(InvalidMethodError):
        confidence_interval(weiner, "d", target=Target.GLOBAL)


def test_ci_ratio_rejects_difference_method(weiner):
    with pytest.raises(InvalidMethodError):
        ci_ratio(weiner, "d")


def test_ratio_interval_needs_positive_values():
    counts = PairedCounts.from_sequence([0, 5, 0, 5, 3, 4, 6, 20])
    with pytest.raises(ZeroPredictiveValueError):
        ci_ratio(counts, "R")
    # the negative side and the difference scale remain defined
    assert ci_ratio(counts, "R", target=Target.NEGATIVE).lower > 0
    assert ci_difference(counts).width > 0


# ---------------------------------------------
# Individual tests
# ---------------------------------------------

def test_individual_test_result_fields(weiner):
    result = individual_test(weiner, "d(p)", Target.NEGATIVE)
    assert result.df == 1
    assert result.method == MethodId.D_POOLED
    assert result.target == Target.NEGATIVE
    assert result.p_value == pytest.approx(math.erfc(math.sqrt(result.statistic / 2)))


@pytest.mark.parametrize("method", ALL_METHODS, ids=[m.value for m in ALL_METHODS])
def test_individual_statistics_under_symmetries(many_random_tables, method):
    for counts in many_random_tables:
        positive = individual_test(counts, method, Target.POSITIVE).statistic
        negative = individual_test(counts, method, Target.NEGATIVE).statistic
        assert individual_test(test_symmetry(counts), method, Target.POSITIVE).statistic == pytest.approx(
            positive, rel=1e-9, abs=1e-12
        )
        assert individual_test(diagnosis_symmetry(counts), method, Target.POSITIVE).statistic == pytest.approx(
            negative, rel=1e-9, abs=1e-12
        )


def test_individual_statistic_zero_when_values_equal():
    # x2 = x3 and x6 = x7
    counts = PairedCounts.from_sequence([10, 4, 4, 3, 2, 5, 5, 20])
    for method in ("d", "LR", "R", "d(p)", "LR(p)", "R(p)"):
        assert individual_test(counts, method).statistic == pytest.approx(0.0, abs=1e-24)
        assert individual_test(counts, method).p_value == pytest.approx(1.0)


def test_individual_test_zero_variance():
    counts = PairedCounts.from_sequence([5, 0, 0, 0, 0, 0, 0, 5])
    with pytest.raises(ZeroVarianceError) as info:
        individual_test(counts, "d")
    assert "sigma_d^2" in str(info.value)


def test_individual_test_empty_margin():
    with pytest.raises(EmptyMarginError):
        individual_test(PairedCounts.from_sequence([0, 0, 0, 5, 0, 0, 0, 5]), "d")


def test_adjusted_test_accepts_table_with_empty_margin():
    # adding 0.5 fills every margin
    result = individual_test(PairedCounts.from_sequence([0, 0, 0, 5, 0, 0, 0, 5]), "d(a)")
    assert result.statistic >= 0


# ---------------------------------------------
# Global tests and confidence regions
# ---------------------------------------------

def _global_or_singular(counts, method):
    try:
        return global_test(counts, method).statistic
    except SingularMatrixError:
        return None


@pytest.mark.parametrize("method", ALL_METHODS, ids=[m.value for m in ALL_METHODS])
def test_global_statistic_under_symmetries(many_random_tables, method):
    """Invariant under both symmetries; a pooled matrix that is not positive definite stays so."""
    undefined = 0
    for counts in many_random_tables:
        statistic = _global_or_singular(counts, method)
        transformed = [_global_or_singular(t(counts), method) for t in (test_symmetry, diagnosis_symmetry)]
        if statistic is None:
            undefined += 1
            assert transformed == [None, None]
            continue
        assert statistic >= 0
        for value in transformed:
            assert value == pytest.approx(statistic, rel=1e-9, abs=1e-12)
    if MethodId(method).variant != Variant.POOLED:
        assert undefined == 0
    assert undefined < len(many_random_tables) // 5


@pytest.mark.parametrize("method", ["d(p)", "LR(p)", "R(p)"])
def test_pooled_global_statistic_on_worked_examples(weiner, roldan, method):
    for counts in (weiner, roldan):
        assert global_test(counts, method).statistic > 0


def test_pooled_global_test_uses_pooled_covariance(roldan):
    for method in (MethodId.D_POOLED, MethodId.LR_POOLED):
        matrix = pooled_covariance(roldan, method.family)
        estimate = estimates(roldan)
        if method.family == Family.DIFFERENCE:
            vector = (estimate.d_hat, estimate.dbar_hat)
        else:
            vector = (math.log(estimate.R_hat), math.log(estimate.Rbar_hat))
        assert global_test(roldan, method).statistic == pytest.approx(quadratic_form(vector, matrix), rel=1e-12)


def test_not_positive_definite_pooled_matrix_is_reported(many_random_tables):
    found = False
    for counts in many_random_tables:
        matrix = pooled_covariance(counts, Family.DIFFERENCE)
        if matrix.a11 > 0 and matrix.det > 1e-14 * abs(matrix.a11 * matrix.a22):
            continue
        found = True
        with pytest.raises(SingularMatrixError):
            global_test(counts, MethodId.D_POOLED)
    assert found


def test_global_test_fields(weiner):
    result = global_test(weiner, "LR")
    assert result.df == 2
    assert result.target == Target.GLOBAL
    assert result.p_value == pytest.approx(math.exp(-result.statistic / 2))


def test_confidence_region_contains_estimate(weiner):
    d_hat = 554 / 620 - 502 / 570
    dbar_hat = 197 / 251 - 195 / 301
    assert confidence_region_contains(weiner, (d_hat, dbar_hat))
    # homogeneity is rejected by the global test, so (0, 0) is outside
    assert not confidence_region_contains(weiner, (0.0, 0.0))
    assert global_test(weiner, "d").statistic > chisq_isf(0.05, 2)


def test_confidence_region_on_ratio_scale(weiner):
    assert not confidence_region_contains(weiner, (1.0, 1.0), method="LR")
    with pytest.raises(InvalidMarginError):
        confidence_region_contains(weiner, (0.0, 1.0), method="LR")
    with pytest.raises(ValueError):
        confidence_region_contains(weiner, (1.0,), method="LR")


def test_ratio_scale_covariance(weiner):
    cov = ratio_covariance(weiner)
    r_hat = (554 / 620) / (502 / 570)
    rbar_hat = (197 / 251) / (195 / 301)
    assert ratio_scale_covariance(weiner) == pytest.approx(cov.sigma_R_Rbar * r_hat * rbar_hat, rel=1e-12)


# ---------------------------------------------
# Non-inferiority
# ---------------------------------------------

def test_noninferiority_difference(weiner):
    result = noninferiority_test(weiner, "d", margin=-0.05)
    assert result.reject
    assert result.z > result.critical_value
    assert result.critical_value == pytest.approx(1.644854, abs=1e-6)
    assert result.test.statistic == pytest.approx(result.z ** 2)
    assert result.one_sided_p_value < 0.05


def test_noninferiority_ratio_accepts_when_margin_is_tight(weiner):
    # R̂ ≈ 1.0146 is close to ρ = 0.99 compared with its standard error
    result = noninferiority_test(weiner, "LR", margin=0.99)
    assert not result.reject
    assert result.one_sided_p_value > 0.05


def test_noninferiority_matches_interval(weiner):
    """Rejection at α is equivalent to the margin lying below the (1-2α) interval."""
    interval = confidence_interval(weiner, "R(a)", alpha=0.10)
    assert interval.lower < 0.99
    inside = noninferiority_test(weiner, "R(a)", margin=interval.lower + 0.001)
    below = noninferiority_test(weiner, "R(a)", margin=interval.lower - 0.001)
    assert below.reject
    assert not inside.reject


@pytest.mark.parametrize(
    "method, margin",
    [("d", 0.0), ("d", 0.05), ("LR", 1.0), ("R", 0.0), ("R(a)", 1.2)],
    ids=["zero_delta", "positive_delta", "unit_rho", "zero_rho", "rho_above_one"],
)
def test_noninferiority_rejects_invalid_margin(weiner, method, margin):
    with pytest.raises(InvalidMarginError):
        noninferiority_test(weiner, method, margin)


def test_noninferiority_rejects_pooled(weiner):
    with pytest.raises(InvalidMethodError):
        noninferiority_test(weiner, "d(p)", -0.05)


def test_shifted_statistic_at_null_matches_individual_test(weiner):
    for method in ("d", "d(a)", "LR", "R", "R(a)"):
        null = 0.0 if method.startswith("d") else 1.0
        assert shifted_statistic(weiner, method, null) == pytest.approx(
            individual_test(weiner, method).statistic, rel=1e-12
        )
