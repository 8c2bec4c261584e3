"""Command line interface definition."""

import logging
import sys
from typing import List, Optional, Tuple, cast

import click
from click.core import Context, Parameter
from pydantic import ValidationError

from .. import services, version, views
from ..config import DEFAULT_CONFIG_PATH
from ..model import MaxDiffError, PooledSample
from ..simulation import Method, run_experiment
from ..tuning import DEFAULT_GRID, scan_tau
from . import describe, exit_code, load_config, load_logger

log = logging.getLogger(__name__)

OUTPUT_OPTION = click.option(
    "-o",
    "--output",
    type=click.Choice(["table", "json", "csv"]),
    default="table",
    help="Output format",
)


def _fail(error: Exception) -> None:
    """Log the error and exit with the code of its family."""
    log.error(describe(error))
    sys.exit(exit_code(error))


def _parse_methods(_ctx: Context, _param: Parameter, value: str) -> List[str]:
    """Split the comma separated list of methods."""
    methods = [method.strip() for method in value.split(",") if method.strip()]
    unknown = set(methods) - {"mod", "camod"}
    if not methods or unknown:
        raise click.BadParameter("use a comma separated list of mod and camod")
    return list(dict.fromkeys(methods))


def _parse_grid(
    _ctx: Context, _param: Parameter, value: Optional[str]
) -> Tuple[float, ...]:
    """Split the comma separated list of candidate quantiles."""
    if value is None:
        return DEFAULT_GRID
    try:
        return tuple(float(quantile) for quantile in value.split(","))
    except ValueError as error:
        raise click.BadParameter(f"use comma separated numbers: {error}") from error


@click.group()
@click.version_option(version="", message=version.version_info())
@click.option("-v", "--verbose", is_flag=True)
@click.option(
    "-c",
    "--config_path",
    default=DEFAULT_CONFIG_PATH,
    help="configuration file path",
    envvar="MAXDIFF_CONFIG_PATH",
)
@click.pass_context
def cli(ctx: Context, config_path: str, verbose: bool) -> None:
    """Compare the distributions of K multivariate samples."""
    ctx.ensure_object(dict)
    load_logger(verbose)
    ctx.obj["config"] = load_config(config_path)


@cli.command("test")
@click.option("-i", "--input", "input_path", required=True, help="CSV file")
@click.option("--mode", type=click.Choice(["mod", "camod", "both"]), default="both")
@click.option("--regression", is_flag=True, help="Test the least squares residuals")
@click.option("--tau-quantile", type=float, help="Quantile of the distances")
@click.option("--tau", type=float, help="Explicit connectivity threshold")
@click.option("--alpha", type=float, help="Significance level")
@click.option("--mc-outer", type=int, help="Monte Carlo replicates B")
@click.option("--mc-inner", type=int, help="Gaussian draws N per replicate")
@click.option("--seed", type=int, help="Seed of the Monte Carlo calibration")
@click.option("--threads", type=int, help="Monte Carlo workers")
@click.option("--diagnostics", is_flag=True, help="Attach the power diagnostics")
@click.option("--group-column", help="Column with the group labels")
@click.option("--covariate-prefix", help="Prefix of the covariate columns")
@OUTPUT_OPTION
@click.pass_context
def test_command(
    ctx: Context,
    input_path: str,
    mode: services.Mode,
    regression: bool,
    output: views.OutputFormat,
    diagnostics: bool,
    group_column: Optional[str] = None,
    covariate_prefix: Optional[str] = None,
    **overrides: Optional[float],
) -> None:
    """Test whether the groups of the CSV file share one distribution."""
    try:
        config = ctx.obj["config"]
        test_config = services.build_test_config(
            config, diagnostics=diagnostics or None, **overrides
        )
        sample = services.load_sample(
            config, input_path, regression, group_column, covariate_prefix
        )
        reports = services.run_test(sample, test_config, mode)
        views.print_reports(reports, output)
    except (MaxDiffError, ValidationError) as error:
        _fail(error)


@cli.command()
@click.option(
    "--setting", type=click.Choice(["IA", "IB", "II"]), default="IA", show_default=True
)
@click.option(
    "--case",
    type=click.Choice(["1", "2", "3", "mixture", "null"]),
    default="null",
    show_default=True,
    help="1 mean shift, 2 covariance shift, 3 distribution shift",
)
@click.option("--n", "n", type=int, help="Total number of observations")
@click.option("--p", "p", type=int, help="Number of features")
@click.option("--k", "k", type=int, help="Number of groups")
@click.option("--signal", type=float, help="Shift, degrees of freedom or fraction")
@click.option("--reps", type=int, help="Number of replications")
@click.option("--seed", type=int, help="Seed of the scenario")
@click.option(
    "--methods", default="mod,camod", show_default=True, callback=_parse_methods
)
@click.option("--tau-quantile", type=float, help="Quantile of the distances")
@click.option("--tau", type=float, help="Explicit connectivity threshold")
@click.option("--threads", type=int, help="Replication workers")
@click.option("--timings", is_flag=True, help="Show the wall time of each method")
@OUTPUT_OPTION
@click.pass_context
def simulate(
    ctx: Context,
    setting: str,
    case: str,
    methods: List[Method],
    output: views.OutputFormat,
    timings: bool,
    reps: Optional[int] = None,
    seed: Optional[int] = None,
    tau: Optional[float] = None,
    tau_quantile: Optional[float] = None,
    threads: Optional[int] = None,
    **options: Optional[float],
) -> None:
    """Measure the size or power of the tests on simulated data."""
    try:
        config = ctx.obj["config"]
        spec = services.build_scenario(
            config, setting, case, replications=reps, seed=seed, **options
        )
        test_config = services.build_test_config(
            config, tau=tau, tau_quantile=tau_quantile, threads=threads
        )
        table = run_experiment(spec, methods, test_config)
        views.print_experiment(table, output, timings)
    except (MaxDiffError, ValidationError) as error:
        _fail(error)


@cli.command()
@click.option("-i", "--input", "input_path", required=True, help="CSV file")
@click.option(
    "--grid",
    callback=_parse_grid,
    help="Comma separated candidate quantiles, by default 0.25,0.5,0.75",
)
@click.option("--group-column", help="Column with the group labels")
@OUTPUT_OPTION
@click.pass_context
def scan(
    ctx: Context,
    input_path: str,
    grid: Tuple[float, ...],
    output: views.OutputFormat,
    group_column: Optional[str] = None,
) -> None:
    """Evaluate the tuning objective of candidate distance quantiles."""
    try:
        sample = services.load_sample(
            ctx.obj["config"], input_path, group_column=group_column
        )
        tau_scan = scan_tau(cast(PooledSample, sample), grid)
        views.print_scan(tau_scan, output)
    except (MaxDiffError, ValidationError) as error:
        _fail(error)


if __name__ == "__main__":  # pragma: no cover
    # E1120: As the arguments are passed through the function decorators instead of
    # during the function call, pylint get's confused.
    cli(ctx={})  # noqa: E1120
