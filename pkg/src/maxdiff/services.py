"""Define all the orchestration functionality required by the program to work.

Classes and functions that connect the configuration, the adapters and the
statistical modules to achieve the program's purpose.
"""

import logging
from typing import Any, List, Literal, Optional, Union

from .adapters import ingest_csv
from .camod import camod_test
from .config import Config
from .mod import mod_test
from .model import PooledSample, RegressionSample, TestConfig, TestReport
from .regression import Mode as TestMethod
from .regression import regression_test
from .simulation import ScenarioSpec

log = logging.getLogger(__name__)

Mode = Literal["mod", "camod", "both"]
CASE_ALIASES = {
    "1": "mean_shift",
    "2": "cov_shift",
    "3": "dist_shift",
    "mixture": "mixture",
    "null": "null",
}


def build_test_config(config: Config, **overrides: Any) -> TestConfig:  # noqa: ANN401
    """Merge the configured test defaults with the command line overrides.

    Overrides set to None keep the configured value.

    Raises:
        ValidationError: if the merged values break the TestConfig constraints.
    """
    values = {
        key: value
        for key, value in config.section("test").items()
        if key in TestConfig.__fields__
    }
    values.update({key: value for key, value in overrides.items() if value is not None})
    if overrides.get("tau") is not None:
        log.debug("Using the explicit tau, the tau quantile is ignored")
    return TestConfig(**values)


def load_sample(
    config: Config,
    path: str,
    regression: bool = False,
    group_column: Optional[str] = None,
    covariate_prefix: Optional[str] = None,
) -> Union[PooledSample, RegressionSample]:
    """Read the sample of a CSV file with the configured column layout."""
    return ingest_csv(
        path,
        group_column=group_column or str(config.get("csv.group_column", "group")),
        covariate_prefix=covariate_prefix
        or str(config.get("csv.covariate_prefix", "w_")),
        regression=regression,
    )


def run_test(
    sample: Union[PooledSample, RegressionSample],
    test_config: TestConfig,
    mode: Mode = "both",
) -> List[TestReport]:
    """Run the selected tests on the sample.

    Regression samples are tested on their least squares residuals.
    """
    methods: List[TestMethod] = ["mod", "camod"]
    if mode != "both":
        methods = [mode]
    reports = []
    for method in methods:
        if isinstance(sample, RegressionSample):
            reports.append(regression_test(sample, test_config, method))
        elif method == "mod":
            reports.append(mod_test(sample, test_config))
        else:
            reports.append(camod_test(sample, test_config))
    return reports


def build_scenario(
    config: Config,
    setting: str,
    case: str,
    replications: Optional[int] = None,
    seed: Optional[int] = None,
    **options: Any,  # noqa: ANN401
) -> ScenarioSpec:
    """Build the simulation scenario from the command line options.

    Cases can be given by number: 1 mean shift, 2 covariance shift and 3
    distribution shift.

    Raises:
        ValidationError: if the scenario options are not valid.
    """
    defaults = config.section("simulate")
    return ScenarioSpec(
        setting=setting,
        case=CASE_ALIASES.get(case, case),
        replications=defaults.get("replications", 200)
        if replications is None
        else replications,
        seed=defaults.get("seed", 0) if seed is None else seed,
        **{key: value for key, value in options.items() if value is not None},
    )
