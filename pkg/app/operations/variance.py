# app/operations/variance.py

"""
Module: variance.py

Delta-method covariance of (d̂, d̄̂) and (ln R̂, ln R̄̂), the pooled variants,
and a finite-difference oracle for the generic delta formula.

Only the positive-side expressions are written out: the negative-side
variances are the same expressions evaluated on the diagnosis-symmetric table
with the negative predictive values plugged in. The cross terms are invariant
under that transform.

The kernel functions (``difference_variance``, ``difference_cross``,
``log_ratio_variance``, ``log_ratio_cross``, ``pooled_values``) use plain
arithmetic and numpy ufuncs only, so they evaluate a single table or a whole
simulated block alike.
"""

import logging
import math
from typing import Callable, Sequence, Tuple, Union

import numpy as np

from app.exceptions import ZeroPredictiveValueError
from app.operations.core import diagnosis_symmetry, predictive_values, validate_counts
from app.schemas.counts import CellProbabilities, PairedCounts
from app.schemas.inference import Family, Target
from app.schemas.variance import DifferenceCovariance, Matrix2, PooledEstimates, RatioCovariance

logger = logging.getLogger(__name__)

ORACLE_STEP = 1e-6


def difference_variance(c, pa, pb):
    """Variance of P̂_A − P̂_B at plug-in values (pa, pb)."""
    return (
        pa * (1 - pa) / c.n_A
        + pb * (1 - pb) / c.n_B
        - 2 * ((1 - pa) * (1 - pb) * c.x1 + pa * pb * c.x5) / (c.n_A * c.n_B)
    )


def difference_cross(c, pa, pb, na, nb):
    """Covariance of d̂ and d̄̂ at plug-in values."""
    return (
        ((1 - pa) * nb * c.x2 + pa * (1 - nb) * c.x6) / (c.n_A * c.nbar_B)
        + ((1 - pb) * na * c.x3 + pb * (1 - na) * c.x7) / (c.nbar_A * c.n_B)
    )


def log_ratio_variance(c, pa, pb):
    """Variance of ln(P̂_A / P̂_B) at plug-in values."""
    return (
        (1 - pa) / (c.n_A * pa)
        + (1 - pb) / (c.n_B * pb)
        - 2 / (c.n_A * c.n_B) * ((1 - pa) * (1 - pb) / (pa * pb) * c.x1 + c.x5)
    )


def log_ratio_cross(c, pa, pb, na, nb):
    """Covariance of ln R̂ and ln R̄̂ at plug-in values."""
    return (
        ((1 - pa) / pa * c.x2 + (1 - nb) / nb * c.x6) / (c.n_A * c.nbar_B)
        + ((1 - pb) / pb * c.x3 + (1 - na) / na * c.x7) / (c.nbar_A * c.n_B)
    )


def pooled_values(c, pa, pb, na, nb):
    """Weighted estimators under P_A = P_B and N_A = N_B; equal inputs come back unchanged."""
    p_hat = np.where(pa == pb, pa, (c.n_A * pa + c.n_B * pb) / (c.n_A + c.n_B))
    n_hat = np.where(na == nb, na, (c.nbar_A * na + c.nbar_B * nb) / (c.nbar_A + c.nbar_B))
    return p_hat, n_hat


def check_ratio_scale(counts, target: Target = Target.GLOBAL) -> None:
    """
    Ensure the predictive values used on the ratio scale are positive.

    Positive target checks P̂_A, P̂_B; negative checks N̂_A, N̂_B; global checks all four.
    """
    sides = {
        Target.POSITIVE: (("P_A", "x_A"), ("P_B", "x_B")),
        Target.NEGATIVE: (("N_A", "xbar_A"), ("N_B", "xbar_B")),
    }
    wanted = sides[target] if target in sides else sides[Target.POSITIVE] + sides[Target.NEGATIVE]
    for which, numerator in wanted:
        if getattr(counts, numerator) <= 0:
            raise ZeroPredictiveValueError(which)


def difference_covariance(counts: PairedCounts) -> DifferenceCovariance:
    validate_counts(counts)
    pa, pb, na, nb = predictive_values(counts)
    return DifferenceCovariance(
        sigma_d_sq=float(difference_variance(counts, pa, pb)),
        sigma_dbar_sq=float(difference_variance(diagnosis_symmetry(counts), na, nb)),
        sigma_d_dbar=float(difference_cross(counts, pa, pb, na, nb)),
    )


def ratio_covariance(counts: PairedCounts) -> RatioCovariance:
    validate_counts(counts)
    check_ratio_scale(counts)
    pa, pb, na, nb = predictive_values(counts)
    return RatioCovariance(
        sigma_R_sq=float(log_ratio_variance(counts, pa, pb)),
        sigma_Rbar_sq=float(log_ratio_variance(diagnosis_symmetry(counts), na, nb)),
        sigma_R_Rbar=float(log_ratio_cross(counts, pa, pb, na, nb)),
    )


def pooled_estimates(counts: PairedCounts) -> PooledEstimates:
    validate_counts(counts)
    p_hat, n_hat = pooled_values(counts, *predictive_values(counts))
    return PooledEstimates(P_hat=float(p_hat), N_hat=float(n_hat))


def pooled_difference_variance(counts: PairedCounts) -> DifferenceCovariance:
    """Difference covariance with P̂ for both P̂_A, P̂_B and N̂ for both N̂_A, N̂_B."""
    pooled = pooled_estimates(counts)
    p_hat, n_hat = pooled.P_hat, pooled.N_hat
    return DifferenceCovariance(
        sigma_d_sq=float(difference_variance(counts, p_hat, p_hat)),
        sigma_dbar_sq=float(difference_variance(diagnosis_symmetry(counts), n_hat, n_hat)),
        sigma_d_dbar=float(difference_cross(counts, p_hat, p_hat, n_hat, n_hat)),
    )


def pooled_ratio_variance(counts: PairedCounts) -> RatioCovariance:
    validate_counts(counts)
    check_ratio_scale(counts)
    pooled = pooled_estimates(counts)
    p_hat, n_hat = pooled.P_hat, pooled.N_hat
    return RatioCovariance(
        sigma_R_sq=float(log_ratio_variance(counts, p_hat, p_hat)),
        sigma_Rbar_sq=float(log_ratio_variance(diagnosis_symmetry(counts), n_hat, n_hat)),
        sigma_R_Rbar=float(log_ratio_cross(counts, p_hat, p_hat, n_hat, n_hat)),
    )


def pooled_covariance(counts: PairedCounts, family: Family) -> Matrix2:
    """Pooled covariance matrix of the family's scale (difference, or log ratio for both ratio families)."""
    if family == Family.DIFFERENCE:
        return pooled_difference_variance(counts).matrix
    return pooled_ratio_variance(counts).matrix


ProbabilityFunction = Callable[[Sequence[float]], float]


def _partials(f: ProbabilityFunction, p: Sequence[float], h: float) -> list:
    partials = []
    for i in range(len(p)):
        up = list(p)
        down = list(p)
        up[i] += h
        down[i] -= h
        partials.append((f(up) - f(down)) / (2.0 * h))
    return partials


def delta_oracle(
    f: ProbabilityFunction,
    g: ProbabilityFunction,
    cells: Union[CellProbabilities, Sequence[float]],
    n: float,
    h: float = ORACLE_STEP,
) -> Tuple[float, float, float]:
    """
    Brute-force delta method: (V(f̂), V(ĝ), Cov(f̂, ĝ)) at the given cell probabilities.

    Partial derivatives are central differences with step h on each of the
    eight coordinates; f and g receive a list of eight probabilities.
    """
    p = list(cells.values) if isinstance(cells, CellProbabilities) else [float(v) for v in cells]
    if len(p) != 8:
        raise ValueError(f"Expected 8 cell probabilities, got {len(p)}")
    fi = _partials(f, p, h)
    gi = _partials(g, p, h)
    mean_f = math.fsum(a * b for a, b in zip(fi, p))
    mean_g = math.fsum(a * b for a, b in zip(gi, p))
    var_f = math.fsum(a * a * b for a, b in zip(fi, p)) - mean_f * mean_f
    var_g = math.fsum(a * a * b for a, b in zip(gi, p)) - mean_g * mean_g
    cov = math.fsum(a * c * b for a, c, b in zip(fi, gi, p)) - mean_f * mean_g
    logger.debug(f"delta oracle: Σf_i p_i={mean_f:.3e}, Σg_i p_i={mean_g:.3e}")
    return var_f / n, var_g / n, cov / n
