# app/operations/design.py

"""
Module: design.py

Study planning: turning a population scenario into multinomial cell
probabilities (and back), and the sample sizes of the one-sided
non-inferiority tests.

Scenario construction:

1. t_X = (π - (1 - N_X)) / (P_X + N_X - 1), the probability that test X is
   positive, follows from π = t_X P_X + (1 - t_X)(1 - N_X).
2. Within the diseased stratum the two tests are positive with rates
   a = t_A P_A / π and b = t_B P_B / π; the joint rate c11 solves
   O+ = c11 c22 / (c12 c21). Same for the non-diseased stratum with
   t_X (1 - P_X) / (1 - π) and O-.
"""

import logging
import math
from typing import NamedTuple

from app.exceptions import InfeasibleScenarioError, InvalidMarginError, ZeroVarianceError
from app.operations.numerics import normal_quantile
from app.operations.variance import difference_variance, log_ratio_variance
from app.schemas.counts import CellProbabilities
from app.schemas.design import SampleSizeInputs, SampleSizeResult, Scenario

logger = logging.getLogger(__name__)

# |O - 1| below this is treated as independence
ODDS_RATIO_UNIT_TOLERANCE = 1e-9
# rounding slack for cells and bounds
CELL_TOLERANCE = 1e-12


def _positive_rate(prevalence: float, ppv: float, npv: float, test: str) -> float:
    informative = ppv + npv - 1.0
    if abs(informative) < CELL_TOLERANCE:
        raise InfeasibleScenarioError(f"P_{test} + N_{test} = 1: test {test} carries no information")
    t = (prevalence - (1.0 - npv)) / informative
    if not 0.0 < t < 1.0:
        raise InfeasibleScenarioError(f"t_{test} = {t:.6g} must lie in (0, 1)")
    return t


def _joint_rate(a: float, b: float, odds_ratio: float, stratum: str) -> float:
    """P(A+, B+) in a 2x2 table with margins a, b and the given odds ratio."""
    for label, rate in (("A", a), ("B", b)):
        if not 0.0 <= rate <= 1.0:
            raise InfeasibleScenarioError(f"positive rate of test {label} among {stratum} = {rate:.6g} is not a probability")
    if abs(odds_ratio - 1.0) < ODDS_RATIO_UNIT_TOLERANCE:
        return a * b
    s = 1.0 + (a + b) * (odds_ratio - 1.0)
    c11 = (s - math.sqrt(s * s - 4.0 * odds_ratio * (odds_ratio - 1.0) * a * b)) / (2.0 * (odds_ratio - 1.0))
    lower, upper = max(0.0, a + b - 1.0), min(a, b)
    if not lower - CELL_TOLERANCE <= c11 <= upper + CELL_TOLERANCE:
        raise InfeasibleScenarioError(
            f"joint rate {c11:.6g} among {stratum} falls outside [{lower:.6g}, {upper:.6g}]"
        )
    return min(max(c11, lower), upper)


def _stratum(weight: float, a: float, b: float, odds_ratio: float, stratum: str) -> list:
    c11 = _joint_rate(a, b, odds_ratio, stratum)
    cells = [weight * c11, weight * (a - c11), weight * (b - c11), weight * (1.0 - a - b + c11)]
    for i, cell in enumerate(cells):
        if cell < -CELL_TOLERANCE:
            raise InfeasibleScenarioError(f"cell {i + 1} among {stratum} is negative ({cell:.6g})")
    return [max(cell, 0.0) for cell in cells]


def scenario_to_cells(s: Scenario) -> CellProbabilities:
    """
    Cell probabilities p1..p8 of a scenario.

    Raises:
        InfeasibleScenarioError: naming the violated constraint.
    """
    t_a = _positive_rate(s.pi, s.P_A, s.N_A, "A")
    t_b = _positive_rate(s.pi, s.P_B, s.N_B, "B")
    diseased = _stratum(s.pi, t_a * s.P_A / s.pi, t_b * s.P_B / s.pi, s.O_plus, "diseased")
    healthy = _stratum(
        1.0 - s.pi,
        t_a * (1.0 - s.P_A) / (1.0 - s.pi),
        t_b * (1.0 - s.P_B) / (1.0 - s.pi),
        s.O_minus,
        "non-diseased",
    )
    cells = diseased + healthy
    logger.debug(f"{s.label()} -> cells {[round(p, 6) for p in cells]}")
    return CellProbabilities.from_sequence(cells)


def cells_to_scenario(cells: CellProbabilities) -> Scenario:
    """Inverse of scenario_to_cells; every cell must be positive."""
    p = cells.values
    if min(p) <= 0:
        raise InfeasibleScenarioError("odds ratios need every cell probability to be positive")
    p1, p2, p3, p4, p5, p6, p7, p8 = p
    return Scenario(
        P_A=(p1 + p2) / cells.t_A,
        P_B=(p1 + p3) / cells.t_B,
        N_A=(p7 + p8) / cells.tbar_A,
        N_B=(p6 + p8) / cells.tbar_B,
        pi=cells.prevalence,
        O_plus=p1 * p4 / (p2 * p3),
        O_minus=p5 * p8 / (p6 * p7),
    )


def mirror_scenario(s: Scenario) -> Scenario:
    """Scenario of the relabelled population (+ and - swapped); its cells are p_{9-i}."""
    return Scenario(
        P_A=s.N_A,
        P_B=s.N_B,
        N_A=s.P_A,
        N_B=s.P_B,
        pi=1.0 - s.pi,
        O_plus=s.O_minus,
        O_minus=s.O_plus,
    )


class _DesignTable(NamedTuple):
    """Population table of total 1 as seen by the variance kernels: margins t_X, joint cells p1 and p5."""

    n_A: float
    n_B: float
    x1: float
    x5: float


def _design_table(inputs: SampleSizeInputs) -> _DesignTable:
    return _DesignTable(n_A=inputs.t_A, n_B=inputs.t_B, x1=inputs.p1, x5=inputs.p5)


def difference_variance_factor(inputs: SampleSizeInputs) -> float:
    """n·σ_d² at the design values."""
    return float(difference_variance(_design_table(inputs), inputs.P_A, inputs.P_B))


def log_ratio_variance_factor(inputs: SampleSizeInputs) -> float:
    """n·σ_R² at the design values."""
    return float(log_ratio_variance(_design_table(inputs), inputs.P_A, inputs.P_B))


def _sample_size(inputs: SampleSizeInputs, distance: float, factor: float, scale: str) -> SampleSizeResult:
    if not factor > 0:
        raise ZeroVarianceError(f"{scale} variance factor", factor)
    z = normal_quantile(1.0 - inputs.alpha) + normal_quantile(1.0 - inputs.beta)
    n_raw = (z / distance) ** 2 * factor
    result = SampleSizeResult(n=math.ceil(n_raw), n_raw=n_raw, variance_factor=factor, scale=scale, inputs=inputs)
    logger.info(f"Sample size ({scale}): n={result.n} (raw {n_raw:.4f})")
    return result


def sample_size_difference(inputs: SampleSizeInputs) -> SampleSizeResult:
    """
    Sample size of the non-inferiority test of d = δ against d = δ1 > δ.

    n = ((z_{1-α} + z_{1-β}) / (δ - δ1))² · n·σ_d²
    """
    if inputs.delta is None or inputs.delta1 is None:
        raise InvalidMarginError("the difference sample size needs both delta and delta1")
    if not inputs.delta1 > inputs.delta:
        raise InvalidMarginError(f"delta1 must exceed delta (got delta={inputs.delta}, delta1={inputs.delta1})")
    return _sample_size(inputs, inputs.delta - inputs.delta1, difference_variance_factor(inputs), "difference")


def sample_size_ratio(inputs: SampleSizeInputs) -> SampleSizeResult:
    """Sample size of the non-inferiority test of R = ρ against R = ρ1 > ρ, on the log scale."""
    if inputs.rho is None or inputs.rho1 is None:
        raise InvalidMarginError("the ratio sample size needs both rho and rho1")
    if not inputs.rho1 > inputs.rho:
        raise InvalidMarginError(f"rho1 must exceed rho (got rho={inputs.rho}, rho1={inputs.rho1})")
    distance = math.log(inputs.rho) - math.log(inputs.rho1)
    return _sample_size(inputs, distance, log_ratio_variance_factor(inputs), "ratio")
