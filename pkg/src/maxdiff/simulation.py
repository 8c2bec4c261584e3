"""Generate the simulation scenarios and measure the size and power of the tests.

Setting IA compares two groups of sizes n/3 and 2n/3, setting IB compares K
equal groups where the last K/2 are shifted, and setting II adds two standard
normal covariates with unit coefficients to the errors of IA (K=2) or IB.
"""

import logging
import math
import time
from typing import Dict, List, Literal, Optional, Sequence, Tuple, Union

import numpy as np
from joblib import Parallel, delayed
from pydantic import BaseModel  # noqa: E0611
from pydantic import Field

from .camod import camod_test
from .covariance import Seed
from .mod import mod_test
from .model import (
    FloatArray,
    InputError,
    MaxDiffError,
    PooledSample,
    RegressionSample,
    TestConfig,
    validate_regression_sample,
    validate_sample,
)
from .regression import regression_test

log = logging.getLogger(__name__)

Setting = Literal["IA", "IB", "II"]
Case = Literal["null", "mean_shift", "cov_shift", "dist_shift", "mixture"]
Method = Literal["mod", "camod"]

CONTAMINATION_MEAN = 20.0
CONTAMINATION_VARIANCE = 3.0
DEFAULT_CONTAMINATION = 0.05
# Signal of the shift cases times sqrt(p), by (setting, shifted layout).
SHIFT_SIGNALS: Dict[Tuple[str, str], Dict[str, float]] = {
    ("IA", "two"): {"mean_shift": 2.0, "cov_shift": 0.8},
    ("IB", "many"): {"mean_shift": 2.6, "cov_shift": 1.0},
    ("II", "two"): {"mean_shift": 2.0, "cov_shift": 0.8},
    ("II", "many"): {"mean_shift": 1.8, "cov_shift": 0.75},
}


class InvalidSpecError(InputError):
    """Raised when a scenario can't be generated."""


class ScenarioSpec(BaseModel):
    """Define a simulation scenario.

    Attributes:
        setting: IA, IB or II.
        case: Kind of difference between the baseline and the shifted groups.
        n: Total number of observations.
        p: Number of features.
        k: Number of groups, defaults to 2 in IA and II and to 6 in IB.
        d: Number of covariates of setting II.
        signal: Mean shift, covariance shift, t degrees of freedom or
            contamination fraction, defaults to the values of each setting.
        replications: Number of simulated datasets.
        seed: Seed of the scenario.
    """

    setting: Setting = "IA"
    case: Case = "null"
    n: int = Field(150, ge=4)
    p: int = Field(50, ge=1)
    k: Optional[int] = Field(None, ge=2)
    d: int = Field(2, ge=1)
    signal: Optional[float] = None
    replications: int = Field(200, ge=0)
    seed: int = Field(0, ge=0, lt=2**64)

    class Config:
        """Configure the pydantic model."""

        allow_mutation = False
        extra = "forbid"

    @property
    def groups(self) -> int:
        """Return the number of groups of the scenario."""
        if self.k is not None:
            return self.k
        return 6 if self.setting == "IB" else 2

    def group_sizes(self) -> List[int]:
        """Return the size of each group.

        Raises:
            InvalidSpecError: if the groups can't be laid out.
        """
        k = self.groups
        if self.setting == "IA" and k != 2:
            raise InvalidSpecError(f"Setting IA compares 2 groups, got {k}")
        if k == 2 and self.setting != "IB":
            first = self.n // 3
            return [first, self.n - first]
        if k % 2 != 0:
            raise InvalidSpecError(f"Setting {self.setting} needs an even K, got {k}")
        if self.n % k != 0:
            raise InvalidSpecError(f"n = {self.n} can't be split in {k} equal groups")
        return [self.n // k] * k

    def shifted(self) -> List[bool]:
        """Return which groups are drawn from the alternative distribution."""
        k = len(self.group_sizes())
        return [index >= k // 2 for index in range(k)]

    def resolved_signal(self) -> float:
        """Return the signal of the case, using the setting default if unset."""
        if self.case == "null":
            return 0.0
        if self.signal is not None:
            return self.signal
        if self.case == "mixture":
            return DEFAULT_CONTAMINATION
        if self.case == "dist_shift":
            return 45.0 if self.groups == 2 else 30.0
        layout = "two" if self.groups == 2 and self.setting != "IB" else "many"
        return SHIFT_SIGNALS[(self.setting, layout)][self.case] / math.sqrt(self.p)


class ExperimentRow(BaseModel):
    """Rejection rate of a method in a scenario."""

    method: Method
    setting: Setting
    case: Case
    n: int
    p: int
    k: int
    signal: float
    rejection_rate: Optional[float] = Field(None, ge=0, le=1)
    rejections: int = 0
    replications: int
    seed: int
    wall_time: float = 0.0
    error: Optional[str] = None


class ExperimentTable(BaseModel):
    """Rows of a size or power experiment."""

    rows: List[ExperimentRow] = Field(default_factory=list)


def _draw_group(
    rng: np.random.Generator, spec: ScenarioSpec, size: int, shifted: bool
) -> FloatArray:
    """Draw the (p, size) observations of a group."""
    normal = rng.standard_normal((spec.p, size))
    if not shifted or spec.case == "null":
        return normal
    signal = spec.resolved_signal()
    if spec.case == "mean_shift":
        return normal + signal
    if spec.case == "cov_shift":
        # Exact square root of I + signal 11^T.
        scale = (math.sqrt(1 + signal * spec.p) - 1) / spec.p
        return normal + scale * normal.sum(axis=0, keepdims=True)
    if spec.case == "dist_shift":
        chi_square = rng.chisquare(signal, size)
        return normal * np.sqrt((signal - 2) / chi_square)
    contaminated = rng.random(size) < signal
    outliers = CONTAMINATION_MEAN + math.sqrt(CONTAMINATION_VARIANCE) * normal
    return np.where(contaminated, outliers, normal)


def _check_signal(spec: ScenarioSpec) -> None:
    """Reject signals the generators can't use."""
    signal = spec.resolved_signal()
    if spec.case == "dist_shift" and signal <= 2:
        raise InvalidSpecError(
            f"The t distribution needs more than 2 degrees of freedom, got {signal}"
        )
    if spec.case == "mixture" and not 0 <= signal <= 1:
        raise InvalidSpecError(f"The contamination fraction {signal} is not in [0, 1]")
    if spec.case == "cov_shift" and 1 + signal * spec.p <= 0:
        raise InvalidSpecError(
            f"The covariance shift {signal} is not positive definite"
        )


def generate(
    spec: ScenarioSpec, seed: Optional[Seed] = None
) -> Union[PooledSample, RegressionSample]:
    """Draw a dataset of the scenario.

    Args:
        spec: Scenario to draw.
        seed: Seed of this dataset, defaults to the seed of the scenario.

    Raises:
        InvalidSpecError: if the scenario can't be generated.
    """
    sizes = spec.group_sizes()
    _check_signal(spec)
    rng = np.random.default_rng(spec.seed if seed is None else seed)
    errors = [
        _draw_group(rng, spec, size, shifted)
        for size, shifted in zip(sizes, spec.shifted())
    ]
    if spec.setting != "II":
        labels = np.repeat(np.arange(1, len(sizes) + 1), sizes)
        return validate_sample(np.hstack(errors), labels)

    coefficients = np.ones((spec.p, spec.d))
    covariates = [rng.standard_normal((size, spec.d)) for size in sizes]
    responses = [
        coefficients @ group_covariates.T + group_errors
        for group_covariates, group_errors in zip(covariates, errors)
    ]
    return validate_regression_sample(responses, covariates)


def _run_replication(
    spec: ScenarioSpec,
    methods: Sequence[Method],
    config: TestConfig,
    seed: np.random.SeedSequence,
) -> Dict[str, Tuple[Optional[bool], float, Optional[str]]]:
    """Test one dataset with every method.

    Returns:
        Per method, whether it rejected, the time it took and the error if any.
    """
    data_seed, calibration_seed = seed.spawn(2)
    replication_config = config.copy(
        update={
            "seed": int(calibration_seed.generate_state(1, np.uint64)[0]),
            "threads": 1,
        }
    )
    outcome: Dict[str, Tuple[Optional[bool], float, Optional[str]]] = {}
    try:
        sample = generate(spec, data_seed)
    except MaxDiffError as error:
        return {method: (None, 0.0, str(error)) for method in methods}

    for method in methods:
        start = time.perf_counter()
        try:
            if isinstance(sample, RegressionSample):
                report = regression_test(sample, replication_config, method)
            elif method == "mod":
                report = mod_test(sample, replication_config)
            else:
                report = camod_test(sample, replication_config)
        except MaxDiffError as error:
            outcome[method] = (None, time.perf_counter() - start, str(error))
        else:
            outcome[method] = (report.rejected, time.perf_counter() - start, None)
    return outcome


def run_experiment(
    spec: ScenarioSpec,
    methods: Sequence[Method] = ("mod", "camod"),
    config: Optional[TestConfig] = None,
) -> ExperimentTable:
    """Measure the rejection rate of each method over the scenario replications.

    Every replication derives its seeds from the scenario seed and its index, so
    the rates don't depend on config.threads. A method with a failed replication
    gets a row with the error instead of a rate.
    """
    if config is None:
        config = TestConfig()
    if spec.replications == 0:
        return ExperimentTable()
    spec.group_sizes()
    _check_signal(spec)
    if spec.case == "mixture" and config.tau is None:
        log.warning(
            "The mixture outliers are farther from each other than the distance "
            "quantile threshold, their connection variance is usually zero and "
            "the replications fail. Set an explicit tau to test this case."
        )

    seeds = np.random.SeedSequence(spec.seed).spawn(spec.replications)
    outcomes = Parallel(n_jobs=config.threads, prefer="threads")(
        delayed(_run_replication)(spec, methods, config, seed) for seed in seeds
    )

    table = ExperimentTable()
    for method in methods:
        results = [outcome[method] for outcome in outcomes]
        errors = [error for _, _, error in results if error is not None]
        rejections = sum(1 for rejected, _, _ in results if rejected)
        row = ExperimentRow(
            method=method,
            setting=spec.setting,
            case=spec.case,
            n=spec.n,
            p=spec.p,
            k=spec.groups,
            signal=spec.resolved_signal(),
            rejection_rate=None if errors else rejections / spec.replications,
            rejections=rejections,
            replications=spec.replications,
            seed=spec.seed,
            wall_time=sum(elapsed for _, elapsed, _ in results),
            error=errors[0] if errors else None,
        )
        if errors:
            log.warning(
                f"{method} failed in {len(errors)} of {spec.replications} "
                f"replications: {errors[0]}"
            )
        else:
            log.info(
                f"{method} rejected {rejections} of {spec.replications} "
                f"replications of {spec.setting} {spec.case}"
            )
        table.rows.append(row)
    return table
