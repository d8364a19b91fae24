# app/operations/core.py

"""
Module: core.py

Paired-design estimators and the two symmetry transforms.

Functions:
- validate_counts(counts) -> counts: reject tables with an empty diagnostic margin.
- estimates(counts) -> PredictiveEstimates: P̂_A, P̂_B, N̂_A, N̂_B and d̂, d̄̂, R̂, R̄̂.
- diagnosis_symmetry(counts): relabel + and - (x_i -> x_{9-i}).
- test_symmetry(counts): swap tests A and B (x2 <-> x3, x6 <-> x7).
- adjust_half(counts): add 0.5 to every cell.
- substitute_zeros(counts, value): replace empty cells.

The transforms only rely on ``reindex``/``shifted``/``values``, so they accept
both PairedCounts and the simulation's CountsBatch.
"""

import logging

from app.exceptions import EmptyMarginError
from app.schemas.counts import CellProbabilities, PairedCounts, PredictiveEstimates

logger = logging.getLogger(__name__)

# 0-based cell orders
DIAGNOSIS_ORDER = (7, 6, 5, 4, 3, 2, 1, 0)
TEST_ORDER = (0, 2, 1, 3, 4, 6, 5, 7)

ZERO_SUBSTITUTE = 0.05


def validate_counts(counts: PairedCounts) -> PairedCounts:
    """
    Return the table unchanged when all four diagnostic margins are positive.

    Raises:
    - EmptyMarginError naming the first empty margin among n_A, n_B, nbar_A, nbar_B.
    """
    for which in ("n_A", "n_B", "nbar_A", "nbar_B"):
        if getattr(counts, which) <= 0:
            raise EmptyMarginError(which)
    return counts


def predictive_values(counts):
    """(P̂_A, P̂_B, N̂_A, N̂_B) without validation; usable on blocks of tables."""
    return (
        counts.x_A / counts.n_A,
        counts.x_B / counts.n_B,
        counts.xbar_A / counts.nbar_A,
        counts.xbar_B / counts.nbar_B,
    )


def estimates(counts: PairedCounts) -> PredictiveEstimates:
    validate_counts(counts)
    pa, pb, na, nb = predictive_values(counts)
    return PredictiveEstimates(
        P_A_hat=pa,
        P_B_hat=pb,
        N_A_hat=na,
        N_B_hat=nb,
        d_hat=pa - pb,
        dbar_hat=na - nb,
        R_hat=pa / pb if pb > 0 else None,
        Rbar_hat=na / nb if nb > 0 else None,
    )


def diagnosis_symmetry(counts):
    return counts.reindex(DIAGNOSIS_ORDER)


def test_symmetry(counts):
    return counts.reindex(TEST_ORDER)


# not a test function
test_symmetry.__test__ = False


def adjust_half(counts):
    return counts.shifted(0.5)


def substitute_zeros(counts: PairedCounts, value: float = ZERO_SUBSTITUTE) -> PairedCounts:
    if value <= 0:
        raise ValueError("substitute value must be positive")
    replaced = [value if x == 0 else x for x in counts.values]
    if replaced != list(counts.values):
        logger.info(f"Replaced {sum(1 for x in counts.values if x == 0)} empty cell(s) by {value}")
    return PairedCounts.from_sequence(replaced)


def cells_as_counts(cells: CellProbabilities) -> PairedCounts:
    """View probabilities as a table of total 1; variance formulas on it give n·σ² at the population values."""
    return PairedCounts.from_sequence(cells.values)
