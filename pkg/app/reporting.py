# app/reporting.py

"""
Building the one-shot analysis report and rendering reports as text, JSON or CSV.

Text output prints statistics, bounds and probabilities at 4 decimals; JSON
carries the full doubles, and the text of a report re-rendered from its JSON
is identical to the original text.
"""

import io
import logging
from typing import Callable, List, TypeVar

import pandas as pd

from app.exceptions import PredictiveValueError
from app.operations.bennett import bennett_statistics, kosinski_equivalence_check
from app.operations.core import estimates
from app.operations.inference import confidence_interval, global_test, individual_test, ratio_scale_covariance
from app.operations.variance import difference_covariance, pooled_estimates, ratio_covariance
from app.schemas.counts import PairedCounts
from app.schemas.inference import CI_METHODS, MethodId, Target
from app.schemas.report import AnalysisReport, BennettEntry, IntervalEntry, TestEntry
from app.schemas.simulation import GridReport, Metric

logger = logging.getLogger(__name__)

SIDES = (Target.POSITIVE, Target.NEGATIVE)
T = TypeVar("T")


def _attempt(compute: Callable[[], T]):
    """(value, None) on success, (None, message) on a domain error."""
    try:
        return compute(), None
    except PredictiveValueError as e:
        return None, str(e)


def analyze(counts: PairedCounts, alpha: float = 0.05, zero_substituted: bool = False) -> AnalysisReport:
    """
    Estimates, the six intervals, nine individual tests per side, nine global
    tests and the Bennett family for one table.

    An undefined entry records its error; the other entries are still computed.
    """
    intervals = []
    for method in CI_METHODS:
        for target in SIDES:
            interval, error = _attempt(lambda: confidence_interval(counts, method, alpha, target))
            intervals.append(IntervalEntry(method=method, target=target, interval=interval, error=error))
    tests = []
    for method in MethodId:
        for target in SIDES:
            result, error = _attempt(lambda: individual_test(counts, method, target))
            tests.append(TestEntry(method=method, target=target, result=result, error=error))
    global_tests = []
    for method in MethodId:
        result, error = _attempt(lambda: global_test(counts, method))
        global_tests.append(TestEntry(method=method, target=Target.GLOBAL, result=result, error=error))
    bennett = []
    for target in SIDES:
        statistics, error = _attempt(lambda: bennett_statistics(counts, target))
        equivalent, check_error = _attempt(lambda: kosinski_equivalence_check(counts, target))
        bennett.append(
            BennettEntry(target=target, statistics=statistics, equivalent_to_pooled=equivalent, error=error or check_error)
        )
    report = AnalysisReport(
        counts=counts,
        alpha=alpha,
        zero_substituted=zero_substituted,
        estimates=estimates(counts),
        difference_covariance=difference_covariance(counts),
        ratio_covariance=_attempt(lambda: ratio_covariance(counts))[0],
        ratio_scale_covariance=_attempt(lambda: ratio_scale_covariance(counts))[0],
        pooled=pooled_estimates(counts),
        intervals=intervals,
        tests=tests,
        global_tests=global_tests,
        bennett=bennett,
    )
    if report.errors:
        logger.warning(f"{len(report.errors)} analysis entr(y/ies) undefined for this table")
    return report


def _f(value) -> str:
    return "-" if value is None else f"{value:.4f}"


def render_analysis_text(report: AnalysisReport) -> str:
    c = report.counts
    e = report.estimates
    lines: List[str] = [
        "Counts x1..x8: " + " ".join(f"{x:g}" for x in c.values) + f"  (n = {c.n:g})",
    ]
    if report.zero_substituted:
        lines.append("Empty cells replaced by a small constant before analysis")
    lines += [
        "",
        "Estimates",
        f"  P_A = {_f(e.P_A_hat)}  P_B = {_f(e.P_B_hat)}  N_A = {_f(e.N_A_hat)}  N_B = {_f(e.N_B_hat)}",
        f"  d = {_f(e.d_hat)}  dbar = {_f(e.dbar_hat)}  R = {_f(e.R_hat)}  Rbar = {_f(e.Rbar_hat)}",
    ]
    if report.pooled is not None:
        lines.append(f"  pooled P = {_f(report.pooled.P_hat)}  pooled N = {_f(report.pooled.N_hat)}")

    dc = report.difference_covariance
    if dc is not None:
        lines.append(
            f"  var(d) = {dc.sigma_d_sq:.4e}  var(dbar) = {dc.sigma_dbar_sq:.4e}  cov = {dc.sigma_d_dbar:.4e}"
        )
    rc = report.ratio_covariance
    if rc is not None:
        lines.append(
            f"  var(ln R) = {rc.sigma_R_sq:.4e}  var(ln Rbar) = {rc.sigma_Rbar_sq:.4e}  cov = {rc.sigma_R_Rbar:.4e}"
        )
    if report.ratio_scale_covariance is not None:
        lines.append(f"  cov(R, Rbar) = {report.ratio_scale_covariance:.4e}")

    level = round(100 * (1 - report.alpha), 4)
    lines += ["", f"Confidence intervals ({level:g}%)", f"  {'method':<7}{'target':<10}{'lower':>10}{'upper':>10}"]
    for entry in report.intervals:
        if entry.interval is None:
            lines.append(f"  {entry.method.value:<7}{entry.target.value:<10}  undefined: {entry.error}")
        else:
            lines.append(
                f"  {entry.method.value:<7}{entry.target.value:<10}"
                f"{_f(entry.interval.lower):>10}{_f(entry.interval.upper):>10}"
            )

    lines += ["", "Individual homogeneity tests (df 1)", f"  {'method':<7}{'target':<10}{'statistic':>11}{'p-value':>10}"]
    lines += _test_lines(report.tests)
    lines += ["", "Global homogeneity tests (df 2)", f"  {'method':<7}{'target':<10}{'statistic':>11}{'p-value':>10}"]
    lines += _test_lines(report.global_tests)

    header = "".join(f"{label:>10}" for label in ("z_B^2", "z_B'^2", "z_W^2"))
    lines += ["", "Bennett statistics", f"  {'target':<10}{header}  null form = z^2_d(p)"]
    for entry in report.bennett:
        if entry.statistics is None:
            lines.append(f"  {entry.target.value:<10}  undefined: {entry.error}")
        else:
            s = entry.statistics
            lines.append(
                f"  {entry.target.value:<10}{_f(s.z_B_sq):>10}{_f(s.z_Bprime_sq):>10}{_f(s.z_W_sq):>10}"
                f"  {'yes' if entry.equivalent_to_pooled else 'no'}"
            )
    return "\n".join(lines) + "\n"


def _test_lines(entries: List[TestEntry]) -> List[str]:
    lines = []
    for entry in entries:
        if entry.result is None:
            lines.append(f"  {entry.method.value:<7}{entry.target.value:<10}  undefined: {entry.error}")
        else:
            lines.append(
                f"  {entry.method.value:<7}{entry.target.value:<10}"
                f"{_f(entry.result.statistic):>11}{_f(entry.result.p_value):>10}"
            )
    return lines


def analysis_frame(report: AnalysisReport) -> pd.DataFrame:
    records = []
    for entry in report.intervals:
        records.append({
            "section": "interval",
            "method": entry.method.value,
            "target": entry.target.value,
            "lower": entry.interval.lower if entry.interval else None,
            "upper": entry.interval.upper if entry.interval else None,
            "error": entry.error,
        })
    for section, entries in (("individual", report.tests), ("global", report.global_tests)):
        for entry in entries:
            records.append({
                "section": section,
                "method": entry.method.value,
                "target": entry.target.value,
                "statistic": entry.result.statistic if entry.result else None,
                "df": entry.result.df if entry.result else None,
                "p_value": entry.result.p_value if entry.result else None,
                "error": entry.error,
            })
    for entry in report.bennett:
        for label, field in (("z_B^2", "z_B_sq"), ("z_B'^2", "z_Bprime_sq"), ("z_W^2", "z_W_sq")):
            records.append({
                "section": "bennett",
                "method": label,
                "target": entry.target.value,
                "statistic": getattr(entry.statistics, field) if entry.statistics else None,
                "error": entry.error,
            })
    columns = ["section", "method", "target", "lower", "upper", "statistic", "df", "p_value", "error"]
    return pd.DataFrame.from_records(records, columns=columns)


GRID_COLUMNS = [
    "spec_id", "P_A", "P_B", "N_A", "N_B", "pi", "O_plus", "O_minus",
    "n", "N", "alpha", "seed", "target", "method", "metric", "value", "mc_se", "undefined", "error",
]


def grid_frame(report: GridReport) -> pd.DataFrame:
    """One row per (spec, method, quantity); coverage specs give coverage, width and width_median rows."""
    records = []
    for result in report.results:
        spec = result.spec
        base = {
            "spec_id": result.spec_id,
            **spec.scenario.model_dump(),
            "n": spec.n,
            "N": spec.replications,
            "alpha": spec.alpha,
            "seed": spec.seed,
            "target": spec.target.value,
        }
        if result.error:
            for method in spec.methods:
                records.append({**base, "method": method.value, "metric": spec.metric.value, "error": result.error})
            continue
        for row in result.rows:
            common = {**base, "method": row.method.value, "undefined": row.undefined, "error": None}
            if spec.metric == Metric.COVERAGE_WIDTH:
                records.append({**common, "metric": "coverage", "value": row.coverage, "mc_se": row.mc_se})
                records.append({**common, "metric": "width", "value": row.width, "mc_se": row.width_se})
                records.append({**common, "metric": "width_median", "value": row.width_median, "mc_se": None})
            else:
                records.append({**common, "metric": spec.metric.value, "value": row.rate, "mc_se": row.mc_se})
    return pd.DataFrame.from_records(records, columns=GRID_COLUMNS)


def summary_frame(report: GridReport) -> pd.DataFrame:
    columns = ["metric", "quantity", "method", "minimum", "maximum", "average", "lines"]
    records = [
        {**row.model_dump(include={"quantity", "minimum", "maximum", "average", "lines"}),
         "metric": row.metric.value, "method": row.method.value}
        for row in report.summary
    ]
    return pd.DataFrame.from_records(records, columns=columns)


def frame_to_csv(frame: pd.DataFrame) -> str:
    buffer = io.StringIO()
    frame.to_csv(buffer, index=False, lineterminator="\n")
    return buffer.getvalue()


def render_grid_text(report: GridReport) -> str:
    lines: List[str] = []
    for result in report.results:
        spec = result.spec
        lines.append(
            f"[{result.spec_id}] {spec.scenario.label()} n={spec.n} N={spec.replications} "
            f"seed={spec.seed} metric={spec.metric.value} target={spec.target.value}"
        )
        if result.error:
            lines.append(f"  error: {result.error}")
            continue
        for row in result.rows:
            if spec.metric == Metric.COVERAGE_WIDTH:
                lines.append(
                    f"  {row.method.value:<7}C = {_f(row.coverage)} (se {_f(row.mc_se)})  "
                    f"W = {_f(row.width)}  median W = {_f(row.width_median)}"
                )
            else:
                lines.append(f"  {row.method.value:<7}rate = {_f(row.rate)} (se {_f(row.mc_se)})")
            if row.undefined:
                lines.append(f"  {'':<7}{row.undefined} undefined replication(s)")
    if report.summary:
        lines += ["", f"Summary  {'metric':<15}{'quantity':<10}{'method':<7}{'min':>9}{'max':>9}{'avg':>9}"]
        for row in report.summary:
            lines.append(
                f"         {row.metric.value:<15}{row.quantity:<10}{row.method.value:<7}"
                f"{_f(row.minimum):>9}{_f(row.maximum):>9}{_f(row.average):>9}"
            )
    return "\n".join(lines) + "\n"
