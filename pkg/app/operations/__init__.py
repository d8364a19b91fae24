# app/operations/__init__.py

"""
Pure computations on paired diagnostic-test data.

- core: estimators, validation and the symmetry transforms
- numerics: normal and chi-square functions, 2x2 quadratic forms
- variance: delta-method covariances, pooled variants, finite-difference oracle
- method_factory: one strategy per inference family
- inference: intervals, individual / global / non-inferiority tests
- bennett: Bennett and Wu statistics
- design: scenarios and sample sizes
- simulation: seeded Monte Carlo studies
"""

from app.operations.core import (
    adjust_half,
    cells_as_counts,
    diagnosis_symmetry,
    estimates,
    substitute_zeros,
    test_symmetry,
    validate_counts,
)
from app.operations.inference import (
    ci_difference,
    ci_ratio,
    confidence_interval,
    confidence_region_contains,
    global_test,
    individual_test,
    noninferiority_test,
)

__all__ = [
    "adjust_half",
    "cells_as_counts",
    "diagnosis_symmetry",
    "estimates",
    "substitute_zeros",
    "test_symmetry",
    "validate_counts",
    "ci_difference",
    "ci_ratio",
    "confidence_interval",
    "confidence_region_contains",
    "global_test",
    "individual_test",
    "noninferiority_test",
]
