# main.py

"""
Command-line interface.

Counts come from ``--counts x1 ... x8`` or ``--counts-file`` (CSV with header
x1..x8 or JSON ``{"x": [...]}``), ordered as the diseased row then the
non-diseased row, each as (A+,B+), (A+,B-), (A-,B+), (A-,B-).

    python main.py analyze --counts 473 81 29 25 22 44 46 151
    python main.py simulate grids/coverage_width.json --replications 20000
"""

import functools
import logging
import sys
from pathlib import Path
from typing import Optional

import click
import pandas as pd
from pydantic import BaseModel, ValidationError

from app.config import settings
from app.exceptions import InvalidMarginError, PredictiveValueError
from app.ingest import counts_from_values, load_counts, load_grid
from app.operations.bennett import bennett_statistics, kosinski_equivalence_check
from app.operations.core import substitute_zeros
from app.operations.design import sample_size_difference, sample_size_ratio
from app.operations.inference import confidence_interval, global_test, individual_test, noninferiority_test
from app.operations.method_factory import MethodFactory
from app.operations.simulation import run_grid
from app.reporting import (
    analysis_frame,
    analyze as build_analysis,
    frame_to_csv,
    grid_frame,
    render_analysis_text,
    render_grid_text,
    summary_frame,
)
from app.schemas.design import SampleSizeInputs
from app.schemas.inference import Family, Target
from app.schemas.simulation import GridReport, SimulationSpec

logger = logging.getLogger(__name__)

TARGETS = {"pos": Target.POSITIVE, "positive": Target.POSITIVE, "neg": Target.NEGATIVE, "negative": Target.NEGATIVE}
FORMATS = click.Choice(["text", "json", "csv"])


def handle_errors(command):
    """Turn domain and validation errors into a logged message and exit code 1."""

    @functools.wraps(command)
    def wrapper(*args, **kwargs):
        try:
            return command(*args, **kwargs)
        except (PredictiveValueError, ValidationError) as e:
            logger.error(f"{command.__name__}: {e}")
            raise click.ClickException(str(e)) from e

    return wrapper


def counts_options(command):
    command = click.option("--zero-sub", is_flag=True, help="Replace empty cells by ZERO_SUBSTITUTE (0.05) before analysis.")(command)
    command = click.option(
        "--counts-file", type=click.Path(exists=True, dir_okay=False), help="CSV (header x1..x8) or JSON {\"x\": [...]}."
    )(command)
    command = click.option("--counts", "inline_counts", nargs=8, type=str, default=None, help="Cells x1 ... x8.")(command)
    return command


def _counts(inline_counts, counts_file, zero_sub):
    if (inline_counts is None) == (counts_file is None):
        raise click.UsageError("give exactly one of --counts or --counts-file")
    counts = counts_from_values(list(inline_counts)) if inline_counts else load_counts(counts_file)
    if zero_sub:
        counts = substitute_zeros(counts, settings.ZERO_SUBSTITUTE)
    return counts


def _emit(model: BaseModel, fmt: str, text: str) -> None:
    if fmt == "json":
        click.echo(model.model_dump_json(indent=2))
    elif fmt == "csv":
        click.echo(frame_to_csv(pd.json_normalize(model.model_dump(mode="json"))), nl=False)
    else:
        click.echo(text)


@click.group()
@click.option("--log-level", default=None, help="Logging level (default from PVCOMPARE_LOG_LEVEL).")
def cli(log_level: Optional[str]):
    """Compare the predictive values of two binary diagnostic tests on paired samples."""
    logging.basicConfig(
        level=(log_level or settings.LOG_LEVEL).upper(),
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
        stream=sys.stderr,
    )


@cli.command()
@counts_options
@click.option("--alpha", type=float, default=None, help="Error level (default 0.05).")
@click.option("--format", "fmt", type=FORMATS, default="text")
@handle_errors
def analyze(inline_counts, counts_file, zero_sub, alpha, fmt):
    """Estimates, all intervals, individual and global tests, and the Bennett family."""
    counts = _counts(inline_counts, counts_file, zero_sub)
    report = build_analysis(counts, alpha if alpha is not None else settings.ALPHA, zero_substituted=zero_sub)
    if fmt == "json":
        click.echo(report.model_dump_json(indent=2))
    elif fmt == "csv":
        click.echo(frame_to_csv(analysis_frame(report)), nl=False)
    else:
        click.echo(render_analysis_text(report), nl=False)
    if report.errors:
        raise click.ClickException(f"{len(report.errors)} entr(y/ies) undefined; first: {report.errors[0]}")


@cli.command()
@counts_options
@click.option("--method", default="d", help="d, d(a), LR, LR(a), R or R(a).")
@click.option("--target", type=click.Choice(list(TARGETS)), default="pos")
@click.option("--alpha", type=float, default=None)
@click.option("--format", "fmt", type=FORMATS, default="text")
@handle_errors
def ci(inline_counts, counts_file, zero_sub, method, target, alpha, fmt):
    """Confidence interval for the difference or ratio of predictive values."""
    counts = _counts(inline_counts, counts_file, zero_sub)
    alpha = alpha if alpha is not None else settings.ALPHA
    method = MethodFactory.resolve(method)
    interval = confidence_interval(counts, method, alpha, TARGETS[target])
    _emit(interval, fmt, f"{method.value} {TARGETS[target].value}: ({interval.lower:.4f}, {interval.upper:.4f})")


@cli.command()
@counts_options
@click.option("--method", default="d", help="Any of the nine methods, e.g. d(p) or R(a).")
@click.option("--target", type=click.Choice(list(TARGETS)), default="pos")
@click.option("--format", "fmt", type=FORMATS, default="text")
@handle_errors
def test(inline_counts, counts_file, zero_sub, method, target, fmt):
    """Individual homogeneity test (df 1)."""
    counts = _counts(inline_counts, counts_file, zero_sub)
    result = individual_test(counts, method, TARGETS[target])
    _emit(result, fmt, f"{result.method.value} {result.target.value}: statistic = {result.statistic:.4f}, p = {result.p_value:.4f}")


@cli.command("global-test")
@counts_options
@click.option("--method", default="d")
@click.option("--format", "fmt", type=FORMATS, default="text")
@handle_errors
def global_test_command(inline_counts, counts_file, zero_sub, method, fmt):
    """Global homogeneity test of both predictive values (df 2)."""
    counts = _counts(inline_counts, counts_file, zero_sub)
    result = global_test(counts, method)
    _emit(result, fmt, f"{result.method.value} global: statistic = {result.statistic:.4f}, p = {result.p_value:.4f}")


@cli.command()
@counts_options
@click.option("--method", default="d", help="d, d(a), LR, LR(a), R or R(a).")
@click.option("--delta", type=float, default=None, help="Difference margin (< 0).")
@click.option("--rho", type=float, default=None, help="Ratio margin (0 < rho < 1).")
@click.option("--target", type=click.Choice(list(TARGETS)), default="pos")
@click.option("--alpha", type=float, default=None)
@click.option("--format", "fmt", type=FORMATS, default="text")
@handle_errors
def noninferiority(inline_counts, counts_file, zero_sub, method, delta, rho, target, alpha, fmt):
    """One-sided non-inferiority test of test A against test B."""
    counts = _counts(inline_counts, counts_file, zero_sub)
    method = MethodFactory.resolve(method)
    is_difference = method.family == Family.DIFFERENCE
    margin = delta if is_difference else rho
    if margin is None:
        raise InvalidMarginError(f"method {method.value} needs {'--delta' if is_difference else '--rho'}")
    result = noninferiority_test(counts, method, margin, alpha if alpha is not None else settings.ALPHA, TARGETS[target])
    verdict = "non-inferior (H rejected)" if result.reject else "not shown non-inferior"
    _emit(
        result,
        fmt,
        f"{method.value} {TARGETS[target].value} margin {margin:g}: z = {result.z:.4f}, "
        f"critical = {result.critical_value:.4f}, one-sided p = {result.one_sided_p_value:.4f} -> {verdict}",
    )


@cli.command()
@counts_options
@click.option("--target", type=click.Choice(list(TARGETS)), default="pos")
@click.option("--format", "fmt", type=FORMATS, default="text")
@handle_errors
def bennett(inline_counts, counts_file, zero_sub, target, fmt):
    """Bennett, unrestricted Bennett and Wu statistics."""
    counts = _counts(inline_counts, counts_file, zero_sub)
    side = TARGETS[target]
    result = bennett_statistics(counts, side)
    equivalent = kosinski_equivalence_check(counts, side)
    _emit(
        result,
        fmt,
        f"{side.value}: z_B^2 = {result.z_B_sq:.4f}, z_B'^2 = {result.z_Bprime_sq:.4f}, z_W^2 = {result.z_W_sq:.4f}; "
        f"null-estimated form equals z^2_d(p): {'yes' if equivalent else 'no'}",
    )


@cli.command()
@click.option("--pa", "P_A", type=float, required=True)
@click.option("--pb", "P_B", type=float, required=True)
@click.option("--ta", "t_A", type=float, required=True, help="Probability that test A is positive.")
@click.option("--tb", "t_B", type=float, required=True)
@click.option("--p1", type=float, required=True, help="P(S+, A+, B+).")
@click.option("--p5", type=float, required=True, help="P(S-, A+, B+).")
@click.option("--delta", type=float, default=None)
@click.option("--delta1", type=float, default=None)
@click.option("--rho", type=float, default=None)
@click.option("--rho1", type=float, default=None)
@click.option("--alpha", type=float, default=None)
@click.option("--beta", type=float, default=0.2)
@click.option("--format", "fmt", type=FORMATS, default="text")
@handle_errors
def samplesize(fmt, **kwargs):
    """Sample size of the non-inferiority test on the difference and/or ratio scale."""
    if kwargs["alpha"] is None:
        kwargs["alpha"] = settings.ALPHA
    inputs = SampleSizeInputs(**kwargs)
    results = []
    if inputs.delta is not None or inputs.delta1 is not None:
        results.append(sample_size_difference(inputs))
    if inputs.rho is not None or inputs.rho1 is not None:
        results.append(sample_size_ratio(inputs))
    if not results:
        raise InvalidMarginError("give --delta/--delta1 and/or --rho/--rho1")
    for result in results:
        _emit(result, fmt, f"{result.scale}: n = {result.n} (raw {result.n_raw:.4f}, variance factor {result.variance_factor:.4f})")


@cli.command()
@click.argument("grid_file", type=click.Path(exists=True, dir_okay=False))
@click.option("--replications", type=click.IntRange(min=1), default=None, help="Override N of every spec.")
@click.option("--long", "long_mode", is_flag=True, help="Use LONG_REPLICATIONS (10^7) for every spec.")
@click.option("--seed", type=click.IntRange(min=0), default=None, help="Override the master seed of every spec.")
@click.option("--workers", type=click.IntRange(min=1), default=None, help="Worker threads (default from settings).")
@click.option("--output-dir", type=click.Path(file_okay=False), default=None)
@click.option("--format", "fmt", type=FORMATS, default="text")
@handle_errors
def simulate(grid_file, replications, long_mode, seed, workers, output_dir, fmt):
    """Run a simulation grid; writes <grid>.csv, <grid>_summary.csv and <grid>.json."""
    grid = load_grid(grid_file)
    update = {}
    if long_mode:
        update["N"] = settings.LONG_REPLICATIONS
    if replications is not None:
        update["N"] = replications
    if seed is not None:
        update["seed"] = seed
    if update:
        # overrides are validated like grid entries
        grid = [SimulationSpec.model_validate({**spec.model_dump(by_alias=True), **update}) for spec in grid]
    for spec_id, spec in enumerate(grid):
        click.echo(f"spec {spec_id}: seed {spec.seed}, N = {spec.replications}", err=True)

    report: GridReport = run_grid(grid, workers=workers or settings.WORKERS)

    out = Path(output_dir or settings.OUTPUT_DIR)
    out.mkdir(parents=True, exist_ok=True)
    stem = Path(grid_file).stem
    (out / f"{stem}.csv").write_text(frame_to_csv(grid_frame(report)))
    (out / f"{stem}_summary.csv").write_text(frame_to_csv(summary_frame(report)))
    (out / f"{stem}.json").write_text(report.model_dump_json(indent=2))
    logger.info(f"Reports written to {out}")

    if fmt == "json":
        click.echo(report.model_dump_json(indent=2))
    elif fmt == "csv":
        click.echo(frame_to_csv(grid_frame(report)), nl=False)
    else:
        click.echo(render_grid_text(report), nl=False)
    if report.errors:
        raise click.ClickException("; ".join(report.errors))


if __name__ == "__main__":
    cli()
