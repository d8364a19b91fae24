# app/operations/simulation.py

"""
Module: simulation.py

Seeded Monte Carlo evaluation of the inference methods.

Tables are drawn in fixed-size blocks. Block ``k`` of spec ``s`` uses its own
``numpy.random.Generator(PCG64(SeedSequence([seed, s, k])))``, so a report
depends only on the master seed, never on how blocks are scheduled across
worker threads. Every method of a spec is evaluated on the same tables.

Blocks keep the raw multinomial counts. The "(a)" methods add 0.5 to those
raw counts; every other method sees the table with its empty cells replaced
by 0.05.

A statistic that is undefined for a table (non-positive variance, singular
matrix, non-finite value) counts as not significant and, for intervals, as
covering the true value; ``MetricRow.undefined`` reports how many there were.
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence

import numpy as np

from app.exceptions import PredictiveValueError
from app.operations.batch import CountsBatch
from app.operations.core import ZERO_SUBSTITUTE, diagnosis_symmetry, predictive_values, substitute_zeros
from app.operations.design import mirror_scenario, scenario_to_cells
from app.operations.method_factory import MethodFactory
from app.operations.numerics import SINGULAR_TOLERANCE, chisq_isf, normal_quantile, quadratic_form_values
from app.operations.variance import pooled_values
from app.schemas.counts import CellProbabilities, PairedCounts
from app.schemas.inference import Family, MethodId, Target, Variant
from app.schemas.simulation import GridReport, GridRow, Metric, MetricRow, SimulationSpec, SummaryRow

logger = logging.getLogger(__name__)

BLOCK_SIZE = 10_000


def make_rng(seed: int, spec_id: int = 0, block: int = 0) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, spec_id, block])))


def draw_table(cells: CellProbabilities, n: int, rng: np.random.Generator) -> PairedCounts:
    """One multinomial table with empty cells replaced by 0.05."""
    drawn = rng.multinomial(n, cells.values)
    return substitute_zeros(PairedCounts.from_sequence([float(x) for x in drawn]), ZERO_SUBSTITUTE)


def draw_tables(cells: CellProbabilities, n: int, size: int, rng: np.random.Generator) -> CountsBatch:
    """``size`` raw multinomial tables; zeros are left for ``working_tables`` to handle."""
    return CountsBatch(rng.multinomial(n, cells.values, size=size).astype(float))


def working_tables(raw: CountsBatch) -> Dict[Variant, CountsBatch]:
    """Table each variant is computed on: raw + 0.5 for adjusted, zero-substituted otherwise."""
    substituted = raw.substitute_zeros(ZERO_SUBSTITUTE)
    return {
        Variant.CLASSIC: substituted,
        Variant.POOLED: substituted,
        Variant.ADJUSTED: raw.shifted(0.5),
    }


@dataclass
class _Tally:
    """Per-method accumulator of one block."""

    hits: int = 0
    undefined: int = 0
    widths: Optional[np.ndarray] = None


@dataclass
class _Totals:
    hits: int = 0
    undefined: int = 0
    widths: List[np.ndarray] = field(default_factory=list)

    def add(self, tally: _Tally) -> None:
        self.hits += tally.hits
        self.undefined += tally.undefined
        if tally.widths is not None:
            self.widths.append(tally.widths)


def _oriented(tables: Dict[Variant, CountsBatch], method: MethodId, target: Target) -> CountsBatch:
    working = tables[method.variant]
    return diagnosis_symmetry(working) if target == Target.NEGATIVE else working


def _true_value(spec: SimulationSpec, family: Family) -> float:
    """True d or R of the side the spec targets; the negative side is the positive side of the mirrored scenario."""
    s = mirror_scenario(spec.scenario) if spec.target == Target.NEGATIVE else spec.scenario
    return s.d if family == Family.DIFFERENCE else s.R


def _side_statistic(tables: Dict[Variant, CountsBatch], method: MethodId, value: float, target: Target):
    """Squared df-1 statistic against ``value`` and the variance it used."""
    strategy = MethodFactory.create_strategy(method.family)
    working = _oriented(tables, method, target)
    pa, pb, na, nb = predictive_values(working)
    if method.variant == Variant.POOLED:
        p_hat, _ = pooled_values(working, pa, pb, na, nb)
        variance = strategy.variance(working, p_hat, p_hat)
    else:
        variance = strategy.variance(working, pa, pb)
    point = strategy.point(pa, pb)
    z = strategy.signed_statistic(point, variance, value)
    return z * z, variance, point


def _global_statistic(tables: Dict[Variant, CountsBatch], method: MethodId):
    strategy = MethodFactory.create_strategy(method.family)
    working = tables[method.variant]
    pa, pb, na, nb = predictive_values(working)
    if method.variant == Variant.POOLED:
        p_hat, n_hat = pooled_values(working, pa, pb, na, nb)
        plug = (p_hat, p_hat, n_hat, n_hat)
    else:
        plug = (pa, pb, na, nb)
    a11 = strategy.variance(working, plug[0], plug[1])
    a22 = strategy.variance(diagnosis_symmetry(working), plug[2], plug[3])
    a12 = strategy.cross_covariance(working, *plug)
    null = strategy.null_value
    v1 = strategy.displacement(strategy.point(pa, pb), null)
    v2 = strategy.displacement(strategy.point(na, nb), null)
    statistic = quadratic_form_values(v1, v2, a11, a12, a22)
    # positive definite
    definite = (a11 > 0) & ((a11 * a22 - a12 * a12) > SINGULAR_TOLERANCE * np.abs(a11 * a22))
    return statistic, definite


def _evaluate_block(spec: SimulationSpec, raw: CountsBatch) -> Dict[MethodId, _Tally]:
    tallies = {}
    tables = working_tables(raw)
    with np.errstate(divide="ignore", invalid="ignore"):
        if spec.metric == Metric.COVERAGE_WIDTH:
            z = normal_quantile(1.0 - spec.alpha / 2.0)
            critical = z * z
            for method in spec.methods:
                strategy = MethodFactory.create_strategy(method.family)
                truth = _true_value(spec, method.family)
                statistic, variance, point = _side_statistic(tables, method, truth, spec.target)
                defined = np.isfinite(statistic) & (variance > 0)
                lower, upper = strategy.interval(point, variance, z)
                width = upper - lower
                tallies[method] = _Tally(
                    hits=int(np.count_nonzero(~(defined & (statistic > critical)))),
                    undefined=int(np.count_nonzero(~defined)),
                    widths=width[np.isfinite(width)],
                )
        elif spec.metric.is_global:
            critical = chisq_isf(spec.alpha, 2)
            for method in spec.methods:
                statistic, definite = _global_statistic(tables, method)
                defined = np.isfinite(statistic) & definite
                tallies[method] = _Tally(
                    hits=int(np.count_nonzero(defined & (statistic > critical))),
                    undefined=int(np.count_nonzero(~defined)),
                )
        else:
            critical = chisq_isf(spec.alpha, 1)
            for method in spec.methods:
                null = MethodFactory.create_strategy(method.family).null_value
                statistic, variance, _ = _side_statistic(tables, method, null, spec.target)
                defined = np.isfinite(statistic) & (variance > 0)
                tallies[method] = _Tally(
                    hits=int(np.count_nonzero(defined & (statistic > critical))),
                    undefined=int(np.count_nonzero(~defined)),
                )
    return tallies


def _block_sizes(replications: int) -> List[int]:
    full, rest = divmod(replications, BLOCK_SIZE)
    return [BLOCK_SIZE] * full + ([rest] if rest else [])


def _mc_se(q: float, replications: int) -> float:
    return 100.0 * math.sqrt(q * (1.0 - q) / replications)


def _simulate(spec: SimulationSpec, spec_id: int, workers: int) -> List[MetricRow]:
    cells = scenario_to_cells(spec.scenario)
    sizes = _block_sizes(spec.replications)
    logger.info(
        f"Spec {spec_id}: {spec.metric.value}, n={spec.n}, N={spec.replications}, "
        f"seed={spec.seed}, methods={[m.value for m in spec.methods]}"
    )

    def run_block(block: int) -> Dict[MethodId, _Tally]:
        batch = draw_tables(cells, spec.n, sizes[block], make_rng(spec.seed, spec_id, block))
        return _evaluate_block(spec, batch)

    totals = {method: _Totals() for method in spec.methods}
    if workers > 1 and len(sizes) > 1:
        with ThreadPoolExecutor(max_workers=workers) as executor:
            blocks = list(executor.map(run_block, range(len(sizes))))
    else:
        blocks = [run_block(block) for block in range(len(sizes))]
    # reduction in block order
    for tallies in blocks:
        for method, tally in tallies.items():
            totals[method].add(tally)

    rows = []
    replications = spec.replications
    for method in spec.methods:
        total = totals[method]
        q = total.hits / replications
        if spec.metric == Metric.COVERAGE_WIDTH:
            widths = np.concatenate(total.widths) if total.widths else np.empty(0)
            rows.append(
                MetricRow(
                    method=method,
                    coverage=100.0 * q,
                    width=float(widths.mean()) if widths.size else None,
                    width_median=float(np.median(widths)) if widths.size else None,
                    width_se=float(widths.std(ddof=1) / math.sqrt(widths.size)) if widths.size > 1 else None,
                    mc_se=_mc_se(q, replications),
                    undefined=total.undefined,
                )
            )
        else:
            rows.append(MetricRow(method=method, rate=100.0 * q, mc_se=_mc_se(q, replications), undefined=total.undefined))
    logger.info(f"Spec {spec_id} finished")
    return rows


def run_coverage(spec: SimulationSpec, spec_id: int = 0, workers: int = 1) -> List[MetricRow]:
    """Empirical coverage (%), mean and median width of the intervals of each method."""
    if spec.metric != Metric.COVERAGE_WIDTH:
        raise ValueError(f"run_coverage needs metric coverage-width, got {spec.metric.value}")
    return _simulate(spec, spec_id, workers)


def run_size_power(spec: SimulationSpec, spec_id: int = 0, workers: int = 1) -> List[MetricRow]:
    """Rejection rate (%) of each method's df-1 test, or df-2 test for the global metrics."""
    if spec.metric == Metric.COVERAGE_WIDTH:
        raise ValueError("run_size_power needs a size, power, global-size or global-power metric")
    return _simulate(spec, spec_id, workers)


def run_spec(spec: SimulationSpec, spec_id: int = 0, workers: int = 1) -> List[MetricRow]:
    if spec.metric == Metric.COVERAGE_WIDTH:
        return run_coverage(spec, spec_id, workers)
    return run_size_power(spec, spec_id, workers)


def _summarize(results: Sequence[GridRow]) -> List[SummaryRow]:
    groups: Dict[tuple, List[float]] = {}
    for result in results:
        if result.error:
            continue
        for row in result.rows:
            if result.spec.metric == Metric.COVERAGE_WIDTH:
                quantities = (("coverage", row.coverage), ("width", row.width))
            else:
                quantities = (("rate", row.rate),)
            for quantity, value in quantities:
                if value is not None:
                    groups.setdefault((result.spec.metric, quantity, row.method), []).append(value)
    return [
        SummaryRow(
            metric=metric,
            quantity=quantity,
            method=method,
            minimum=min(values),
            maximum=max(values),
            average=math.fsum(values) / len(values),
            lines=len(values),
        )
        for (metric, quantity, method), values in groups.items()
    ]


def run_grid(grid: Iterable[SimulationSpec], workers: int = 1) -> GridReport:
    """
    Run every spec of a grid; a failing spec is recorded with its error and the grid continues.

    Spec ids are the positions in the grid, so the same grid and seeds give the same report.
    """
    results = []
    for spec_id, spec in enumerate(grid):
        try:
            results.append(GridRow(spec_id=spec_id, spec=spec, rows=run_spec(spec, spec_id, workers)))
        except PredictiveValueError as e:
            logger.warning(f"Spec {spec_id} failed: {e}")
            results.append(GridRow(spec_id=spec_id, spec=spec, error=str(e)))
    return GridReport(results=results, summary=_summarize(results))
