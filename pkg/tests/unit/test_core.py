# tests/unit/test_core.py

import pytest

from app.exceptions import EmptyMarginError
from app.operations.core import (
    adjust_half,
    cells_as_counts,
    diagnosis_symmetry,
    estimates,
    predictive_values,
    substitute_zeros,
    test_symmetry,
    validate_counts,
)
from app.schemas.counts import CellProbabilities, PairedCounts


# ---------------------------------------------
# Margins and validation
# ---------------------------------------------

def test_weiner_margins(weiner):
    assert weiner.n == 871
    assert (weiner.n_A, weiner.n_B, weiner.nbar_A, weiner.nbar_B) == (620, 570, 251, 301)
    assert (weiner.x_A, weiner.x_B, weiner.xbar_A, weiner.xbar_B) == (554, 502, 197, 195)
    assert weiner.n_A + weiner.nbar_A == weiner.n
    assert weiner.n_B + weiner.nbar_B == weiner.n


@pytest.mark.parametrize(
    "values",
    [
        (473, 81, 29, 25, 22, 44, 46, 151),
        (0, 0, 0, 0, 1, 1, 1, 1),
    ],
    ids=["weiner", "only_non_diseased"],
)
def test_validate_counts_accepts(values):
    counts = PairedCounts.from_sequence(values)
    assert validate_counts(counts) is counts


@pytest.mark.parametrize(
    "values, which",
    [
        ((0, 0, 0, 5, 0, 0, 0, 5), "n_A"),
        ((0, 5, 0, 5, 0, 5, 0, 5), "n_B"),
        ((5, 5, 0, 0, 5, 5, 0, 0), "nbar_A"),
    ],
    ids=["empty_n_A", "empty_n_B", "empty_nbar_A"],
)
def test_validate_counts_rejects_empty_margin(values, which):
    with pytest.raises(EmptyMarginError) as info:
        validate_counts(PairedCounts.from_sequence(values))
    assert info.value.which == which
    assert which in str(info.value)


# ---------------------------------------------
# Estimates
# ---------------------------------------------

def test_weiner_estimates(weiner):
    e = estimates(weiner)
    assert e.P_A_hat == pytest.approx(0.8935, abs=5e-5)
    assert e.P_B_hat == pytest.approx(0.8807, abs=5e-5)
    assert e.N_A_hat == pytest.approx(0.7849, abs=5e-5)
    assert e.N_B_hat == pytest.approx(0.6478, abs=5e-5)
    assert round(e.d_hat, 4) == 0.0128
    assert round(e.R_hat, 3) == 1.015
    assert round(e.Rbar_hat, 3) == 1.212
    # 0.7849 - 0.6478 printed as 0.1370 from unrounded values
    assert e.dbar_hat == pytest.approx(197 / 251 - 195 / 301)


def test_ratio_undefined_when_denominator_is_zero():
    # x1 = x3 = 0 makes P_B = 0
    e = estimates(PairedCounts.from_sequence([0, 5, 0, 5, 3, 4, 6, 20]))
    assert e.P_B_hat == 0
    assert e.R_hat is None
    assert e.Rbar_hat is not None


def test_adjusted_estimates_differ_from_raw(weiner):
    raw = estimates(weiner)
    adjusted = estimates(adjust_half(weiner))
    assert adjusted.P_A_hat == pytest.approx(555 / 622)
    assert adjusted.P_B_hat == pytest.approx(503 / 572)
    assert adjusted.d_hat == pytest.approx(0.012912, abs=1e-6)
    assert adjusted.d_hat != raw.d_hat


# ---------------------------------------------
# Symmetry transforms
# ---------------------------------------------

def test_diagnosis_symmetry_reverses_cells(weiner):
    mirrored = diagnosis_symmetry(weiner)
    assert mirrored.values == tuple(reversed(weiner.values))
    assert diagnosis_symmetry(mirrored) == weiner


def test_diagnosis_symmetry_swaps_positive_and_negative_values(weiner):
    pa, pb, na, nb = predictive_values(weiner)
    assert predictive_values(diagnosis_symmetry(weiner)) == (na, nb, pa, pb)


def test_test_symmetry_swaps_tests(weiner):
    swapped = test_symmetry(weiner)
    assert swapped.values == (473, 29, 81, 25, 22, 46, 44, 151)
    assert test_symmetry(swapped) == weiner
    pa, pb, na, nb = predictive_values(weiner)
    assert predictive_values(swapped) == (pb, pa, nb, na)


def test_symmetries_commute(many_random_tables):
    for counts in many_random_tables:
        assert test_symmetry(diagnosis_symmetry(counts)) == diagnosis_symmetry(test_symmetry(counts))


def test_adjust_half_adds_to_every_cell(weiner):
    adjusted = adjust_half(weiner)
    assert adjusted.values == tuple(x + 0.5 for x in weiner.values)
    assert adjusted.n == weiner.n + 4


def test_substitute_zeros():
    counts = PairedCounts.from_sequence([0, 5, 0, 5, 3, 4, 6, 20])
    replaced = substitute_zeros(counts)
    assert replaced.values == (0.05, 5, 0.05, 5, 3, 4, 6, 20)
    assert substitute_zeros(replaced) == replaced


def test_substitute_zeros_rejects_non_positive_value(weiner):
    with pytest.raises(ValueError):
        substitute_zeros(weiner, 0)


def test_cells_as_counts_has_unit_total():
    cells = CellProbabilities.from_sequence([0.3, 0.05, 0.0, 0.1, 0.05, 0.05, 0.1, 0.35])
    counts = cells_as_counts(cells)
    assert counts.n == pytest.approx(1.0)
    assert counts.n_A == pytest.approx(cells.t_A)
    assert counts.n_B == pytest.approx(cells.t_B)
