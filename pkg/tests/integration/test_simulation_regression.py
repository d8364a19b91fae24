# tests/integration/test_simulation_regression.py

"""
Monte Carlo regressions on the first line of each bundled grid at N = 10^5.

Reference percentages are published to one decimal, so the tolerance is three
Monte Carlo standard errors plus the rounding half-unit.
"""

from pathlib import Path

import math

import pytest

from app.ingest import load_grid
from app.operations.simulation import run_grid, run_spec
from app.schemas.inference import MethodId
from app.schemas.simulation import Metric, SimulationSpec

GRIDS = Path(__file__).resolve().parents[2] / "grids"

pytestmark = pytest.mark.slow


def _rows(name):
    (spec,) = load_grid(GRIDS / name)
    assert spec.replications == 100_000
    return {row.method: row for row in run_spec(spec, workers=4)}


def _close(value, expected, mc_se):
    return abs(value - expected) <= 3 * mc_se + 0.05


@pytest.fixture(scope="module")
def coverage_rows():
    return _rows("coverage_width.json")


@pytest.mark.parametrize(
    "method, expected",
    [(MethodId.D, 93.9), (MethodId.D_ADJUSTED, 95.6), (MethodId.LR, 95.6), (MethodId.R_ADJUSTED, 96.8)],
)
def test_coverage(coverage_rows, method, expected):
    row = coverage_rows[method]
    assert _close(row.coverage, expected, row.mc_se), (method, row.coverage)


@pytest.mark.parametrize(
    "method, expected",
    [(MethodId.D, 0.376), (MethodId.D_ADJUSTED, 0.364), (MethodId.LR, 0.498)],
)
def test_width(coverage_rows, method, expected):
    assert coverage_rows[method].width == pytest.approx(expected, abs=0.003)


@pytest.mark.parametrize(
    "name, expected",
    [
        ("individual_size.json", {MethodId.D: 6.1, MethodId.D_ADJUSTED: 4.4, MethodId.D_POOLED: 4.9,
                                  MethodId.LR_ADJUSTED: 3.2, MethodId.R_POOLED: 4.9}),
        ("individual_power.json", {MethodId.D_POOLED: 7.4, MethodId.LR_ADJUSTED: 3.7}),
        ("global_size.json", {MethodId.D: 6.0, MethodId.LR_ADJUSTED: 3.1}),
        ("global_power.json", {MethodId.R: 8.1, MethodId.D_POOLED: 4.6}),
    ],
    ids=["individual-size", "individual-power", "global-size", "global-power"],
)
def test_rejection_rates(name, expected):
    rows = _rows(name)
    for method, value in expected.items():
        row = rows[method]
        assert _close(row.rate, value, row.mc_se), (name, method, row.rate)


def test_average_pooled_size_over_full_grid():
    """The pooled difference test holds its size on average across all 24 size settings (reduced N)."""
    grid = [
        SimulationSpec.model_validate({**spec.model_dump(by_alias=True), "N": 20_000, "methods": ["d(p)"]})
        for spec in load_grid(GRIDS / "individual_size_full.json")
    ]
    assert len(grid) == 24
    report = run_grid(grid, workers=4)
    assert report.errors == []
    (summary,) = [row for row in report.summary if row.metric == Metric.SIZE and row.method == MethodId.D_POOLED]
    assert summary.lines == 24
    mc_se = math.sqrt(sum(result.rows[0].mc_se ** 2 for result in report.results)) / len(report.results)
    assert _close(summary.average, 4.9, mc_se), (summary.average, mc_se)
