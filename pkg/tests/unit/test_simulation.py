# tests/unit/test_simulation.py

import math

import numpy as np
import pytest
from pydantic import ValidationError
from scipy import stats

from app.operations.batch import CountsBatch
from app.operations.design import scenario_to_cells
from app.operations.simulation import (
    BLOCK_SIZE,
    _block_sizes,
    draw_table,
    draw_tables,
    make_rng,
    run_coverage,
    run_grid,
    run_size_power,
    run_spec,
    working_tables,
)
from app.schemas.counts import CellProbabilities, PairedCounts
from app.schemas.design import Scenario
from app.schemas.inference import CI_METHODS, MethodId, Target, Variant
from app.schemas.simulation import Metric, SimulationSpec

NULL_SCENARIO = Scenario(P_A=0.8, P_B=0.8, N_A=0.8, N_B=0.8, pi=0.35, O_plus=5, O_minus=2)
POWER_SCENARIO = Scenario(P_A=0.8, P_B=0.7, N_A=0.7, N_B=0.7, pi=0.35, O_plus=5, O_minus=2)


def make_spec(metric, methods, n=100, replications=2000, scenario=NULL_SCENARIO, **extra):
    return SimulationSpec(
        scenario=scenario,
        n=n,
        N=replications,
        methods=methods,
        metric=metric,
        seed=777,
        **extra,
    )


# ---------------------------------------------
# Drawing tables
# ---------------------------------------------

def test_make_rng_is_reproducible():
    first = make_rng(1, 2, 3).integers(0, 1_000_000, size=5)
    second = make_rng(1, 2, 3).integers(0, 1_000_000, size=5)
    other = make_rng(1, 2, 4).integers(0, 1_000_000, size=5)
    assert np.array_equal(first, second)
    assert not np.array_equal(first, other)


def test_draw_table_of_size_zero():
    cells = scenario_to_cells(NULL_SCENARIO)
    table = draw_table(cells, 0, make_rng(1))
    assert table.values == (0.05,) * 8


def test_draw_table_with_single_cell():
    cells = CellProbabilities.from_sequence([1, 0, 0, 0, 0, 0, 0, 0])
    table = draw_table(cells, 10, make_rng(1))
    assert table == PairedCounts.from_sequence([10] + [0.05] * 7)


def test_draw_tables_follow_the_cell_probabilities():
    cells = scenario_to_cells(NULL_SCENARIO)
    batch = draw_tables(cells, 200, 5000, make_rng(2024))
    assert isinstance(batch, CountsBatch)
    assert len(batch) == 5000
    counts = batch.values
    assert np.all(counts.sum(axis=1) == 200)
    totals = counts.sum(axis=0)
    expected = np.array(cells.values) * totals.sum()
    assert stats.chisquare(totals, f_exp=expected).pvalue > 1e-6


def test_batch_matches_single_tables():
    cells = scenario_to_cells(POWER_SCENARIO)
    batch = draw_tables(cells, 50, 20, make_rng(5))
    for i in range(len(batch)):
        table = PairedCounts.from_sequence(batch.values[i].tolist())
        assert table.n_A == pytest.approx(batch.n_A[i])
        assert table.xbar_B == pytest.approx(batch.xbar_B[i])


def test_draw_tables_keeps_raw_counts():
    cells = scenario_to_cells(POWER_SCENARIO)
    batch = draw_tables(cells, 20, 2000, make_rng(8))
    assert np.all(batch.values == np.round(batch.values))
    assert np.any(batch.values == 0)
    assert np.all(batch.values.sum(axis=1) == 20)


def test_adjusted_tables_shift_raw_counts():
    raw = CountsBatch(np.array([[0, 3, 0, 7, 2, 0, 1, 4], [5, 1, 2, 2, 0, 3, 3, 4]], dtype=float))
    tables = working_tables(raw)
    adjusted = tables[Variant.ADJUSTED].values
    # an empty cell becomes 0.5, not 0.05 + 0.5
    assert adjusted[0, 0] == 0.5
    assert adjusted[1, 4] == 0.5
    np.testing.assert_array_equal(adjusted, raw.values + 0.5)
    for variant in (Variant.CLASSIC, Variant.POOLED):
        np.testing.assert_array_equal(tables[variant].values, np.where(raw.values == 0, 0.05, raw.values))


def test_batch_rejects_wrong_shape():
    with pytest.raises(ValueError):
        CountsBatch(np.zeros((3, 7)))


def test_block_sizes():
    assert _block_sizes(BLOCK_SIZE * 2 + 5) == [BLOCK_SIZE, BLOCK_SIZE, 5]
    assert _block_sizes(5) == [5]
    assert sum(_block_sizes(123_456)) == 123_456


# ---------------------------------------------
# Running specs
# ---------------------------------------------

def test_coverage_and_size_are_complementary():
    """At a null scenario every table either covers the truth or rejects homogeneity."""
    coverage = run_coverage(make_spec(Metric.COVERAGE_WIDTH, list(CI_METHODS)))
    size = run_size_power(make_spec(Metric.SIZE, list(CI_METHODS)))
    for covered, rejected in zip(coverage, size):
        assert covered.method == rejected.method
        assert covered.coverage + rejected.rate == pytest.approx(100.0, abs=1e-9)
        assert covered.mc_se == pytest.approx(rejected.mc_se)


def test_coverage_rows():
    rows = run_spec(make_spec(Metric.COVERAGE_WIDTH, [MethodId.D, MethodId.R_ADJUSTED]))
    assert [row.method for row in rows] == [MethodId.D, MethodId.R_ADJUSTED]
    for row in rows:
        assert 80.0 < row.coverage <= 100.0
        assert row.width > 0
        assert row.width_median > 0
        assert row.width_se > 0
        assert row.rate is None
        q = row.coverage / 100
        assert row.mc_se == pytest.approx(100 * math.sqrt(q * (1 - q) / 2000))


def test_negative_target_coverage():
    rows = run_spec(make_spec(Metric.COVERAGE_WIDTH, [MethodId.LR], target=Target.NEGATIVE))
    assert 80.0 < rows[0].coverage <= 100.0


def test_negative_target_covers_negative_difference():
    # d = 0.1 on the positive side, dbar = 0 on the negative side
    spec = make_spec(Metric.COVERAGE_WIDTH, [MethodId.D, MethodId.R], scenario=POWER_SCENARIO, target=Target.NEGATIVE)
    rows = {row.method: row for row in run_spec(spec)}
    assert rows[MethodId.D].coverage > 90.0
    assert rows[MethodId.R].coverage > 90.0


def test_size_rows():
    rows = run_spec(make_spec(Metric.SIZE, list(MethodId)))
    assert len(rows) == 9
    for row in rows:
        assert 0.0 <= row.rate < 20.0
        assert row.coverage is None
        assert row.undefined == 0


def test_power_exceeds_size():
    power = run_spec(make_spec(Metric.POWER, [MethodId.D], n=1000, scenario=POWER_SCENARIO))[0]
    size = run_spec(make_spec(Metric.SIZE, [MethodId.D], n=1000))[0]
    assert power.rate > size.rate


def test_global_rows():
    rows = run_spec(make_spec(Metric.GLOBAL_SIZE, [MethodId.D, MethodId.LR_POOLED, MethodId.R]))
    for row in rows:
        assert 0.0 <= row.rate < 20.0


def test_results_do_not_depend_on_worker_count():
    spec = make_spec(Metric.SIZE, [MethodId.D, MethodId.LR_POOLED], replications=BLOCK_SIZE * 2 + 500)
    single = run_spec(spec, spec_id=3, workers=1)
    threaded = run_spec(spec, spec_id=3, workers=4)
    assert single == threaded


def test_wrong_runner_for_metric():
    with pytest.raises(ValueError):
        run_coverage(make_spec(Metric.SIZE, [MethodId.D]))
    with pytest.raises(ValueError):
        run_size_power(make_spec(Metric.COVERAGE_WIDTH, [MethodId.D]))


# ---------------------------------------------
# Grids
# ---------------------------------------------

def test_grid_records_failing_specs():
    infeasible = Scenario(P_A=0.5, P_B=0.8, N_A=0.5, N_B=0.8, pi=0.35, O_plus=1, O_minus=1)
    grid = [
        make_spec(Metric.SIZE, [MethodId.D], replications=500),
        make_spec(Metric.SIZE, [MethodId.D], replications=500, scenario=infeasible),
        make_spec(Metric.SIZE, [MethodId.D], replications=500, n=200),
    ]
    report = run_grid(grid)
    assert [row.spec_id for row in report.results] == [0, 1, 2]
    assert report.results[1].error is not None
    assert report.results[1].rows == []
    assert len(report.errors) == 1
    assert "Infeasible scenario" in report.errors[0]
    (summary,) = report.summary
    assert summary.lines == 2
    assert summary.quantity == "rate"
    assert summary.minimum <= summary.average <= summary.maximum


def test_empty_grid():
    report = run_grid([])
    assert report.results == []
    assert report.summary == []


# ---------------------------------------------
# Spec validation
# ---------------------------------------------

def test_spec_rejects_pooled_interval():
    with pytest.raises(ValidationError):
        make_spec(Metric.COVERAGE_WIDTH, [MethodId.D_POOLED])


def test_spec_rejects_global_target():
    with pytest.raises(ValidationError):
        make_spec(Metric.SIZE, [MethodId.D], target=Target.GLOBAL)


def test_spec_rejects_empty_methods():
    with pytest.raises(ValidationError):
        make_spec(Metric.SIZE, [])


def test_spec_replications_alias():
    spec = make_spec(Metric.SIZE, [MethodId.D], replications=1234)
    assert spec.replications == 1234
    assert spec.model_dump(by_alias=True)["N"] == 1234
