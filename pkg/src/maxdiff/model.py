"""Define the data model shared by the whole testing pipeline.

Classes:
    PooledSample: Feature matrix plus the partition of its columns in K groups.
    RegressionSample: Per group responses and covariates.
    TestConfig: Tuning knobs of a single test run.
    TestReport: Outcome of a single test run.
"""

import logging
from dataclasses import dataclass
from typing import Any, Dict, Hashable, List, Literal, Optional, Sequence, Tuple

import numpy as np
from numpy.typing import ArrayLike, NDArray
from pydantic import BaseModel  # noqa: E0611
from pydantic import Field, validator

from .version import __version__

log = logging.getLogger(__name__)

FloatArray = NDArray[np.float64]
IntArray = NDArray[np.int64]


class MaxDiffError(Exception):
    """Gather all the errors raised by the program."""


class InputError(MaxDiffError):
    """Gather the errors caused by invalid user data or options."""


class DegenerateStatisticError(MaxDiffError):
    """Gather the errors where the test statistic is not defined for the data."""


class NumericalError(MaxDiffError):
    """Gather the failures of the numerical linear algebra routines."""


class EmptyGroupError(InputError):
    """Raised when a group has less than two observations."""


class NonFiniteDataError(InputError):
    """Raised when the data contains NaN or infinite values."""


class LabelMismatchError(InputError):
    """Raised when the number of labels differs from the number of observations."""


class TooFewGroupsError(InputError):
    """Raised when there are less than two groups to compare."""


def _freeze(array: NDArray[Any]) -> NDArray[Any]:
    """Make the array read only so the containing model can be shared safely."""
    array.setflags(write=False)
    return array


# eq=False: numpy arrays don't support the element wise truth value that the
# generated __eq__ needs.
@dataclass(frozen=True, eq=False)
class PooledSample:
    """Observations of the K samples pooled in a single matrix.

    Attributes:
        data: Feature matrix of shape (p, n), one column per observation.
        groups: Group of each observation encoded as 1, ..., K.
        group_sizes: Number of observations of each group.
        labels: Original label of each encoded group, in encoding order.
    """

    data: FloatArray
    groups: IntArray
    group_sizes: IntArray
    labels: Tuple[Hashable, ...]

    @property
    def n(self) -> int:
        """Return the total number of observations."""
        return int(self.data.shape[1])

    @property
    def p(self) -> int:
        """Return the number of features."""
        return int(self.data.shape[0])

    @property
    def k(self) -> int:
        """Return the number of groups."""
        return len(self.group_sizes)

    def members(self, group: int) -> IntArray:
        """Return the indices of the observations of the 1-based group."""
        return np.flatnonzero(self.groups == group)

    def membership(self) -> FloatArray:
        """Return the (n, K) one-hot matrix of group membership."""
        return np.equal.outer(self.groups, np.arange(1, self.k + 1)).astype(
            np.float64
        )

    def own_group_sizes(self) -> FloatArray:
        """Return n_{g_i} for every observation i."""
        return self.group_sizes[self.groups - 1].astype(np.float64)


def _as_label_list(labels: Any) -> List[Hashable]:  # noqa: ANN401
    """Convert the labels into a list of hashable python objects."""
    if isinstance(labels, np.ndarray):
        return list(labels.tolist())
    return [
        label.item() if isinstance(label, np.generic) else label for label in labels
    ]


def validate_sample(data: ArrayLike, labels: Any) -> PooledSample:  # noqa: ANN401
    """Build a PooledSample checking the invariants of the K-sample problem.

    Labels are re-encoded to 1, ..., K in order of first appearance.

    Args:
        data: Matrix of shape (p, n) or a vector of n one dimensional observations.
        labels: Sequence of n hashable group labels.

    Raises:
        InputError: if the data is not a rectangular matrix.
        LabelMismatchError: if the number of labels is not n.
        NonFiniteDataError: if there are NaN or infinite entries.
        TooFewGroupsError: if there is only one group.
        EmptyGroupError: if a group has less than two observations.
    """
    try:
        matrix = np.array(data, dtype=np.float64)
    except (TypeError, ValueError) as error:
        raise InputError(
            f"The data is not a numeric rectangular matrix: {error}"
        ) from error
    if matrix.ndim == 1:
        matrix = matrix.reshape(1, -1)
    if matrix.ndim != 2:
        raise InputError(f"The data must be a matrix, got {matrix.ndim} dimensions")

    raw_labels = _as_label_list(labels)
    if len(raw_labels) != matrix.shape[1]:
        raise LabelMismatchError(
            f"There are {len(raw_labels)} labels for {matrix.shape[1]} observations"
        )

    if not np.all(np.isfinite(matrix)):
        columns = np.flatnonzero(~np.all(np.isfinite(matrix), axis=0))
        raise NonFiniteDataError(
            f"The observations {columns[:5].tolist()} contain non finite values"
        )

    codes: Dict[Hashable, int] = {}
    for label in raw_labels:
        codes.setdefault(label, len(codes) + 1)
    if len(codes) < 2:
        raise TooFewGroupsError(f"At least two groups are needed, got {len(codes)}")

    groups = np.array([codes[label] for label in raw_labels], dtype=np.int64)
    group_sizes = np.bincount(groups, minlength=len(codes) + 1)[1:].astype(np.int64)
    ordered_labels = tuple(codes)
    for label, size in zip(ordered_labels, group_sizes):
        if size < 2:
            raise EmptyGroupError(
                f"The group {label} has {size} observation, at least 2 are needed"
            )

    return PooledSample(
        data=_freeze(matrix),
        groups=_freeze(groups),
        group_sizes=_freeze(group_sizes),
        labels=ordered_labels,
    )


@dataclass(frozen=True, eq=False)
class RegressionSample:
    """Responses and covariates of the K samples of a multivariate regression.

    Attributes:
        responses: Response matrix of shape (p, n_k) of each group.
        covariates: Covariate matrix of shape (n_k, d) of each group.
        labels: Label of each group.
    """

    responses: Tuple[FloatArray, ...]
    covariates: Tuple[FloatArray, ...]
    labels: Tuple[Hashable, ...]

    @property
    def k(self) -> int:
        """Return the number of groups."""
        return len(self.responses)

    @property
    def p(self) -> int:
        """Return the number of response features."""
        return int(self.responses[0].shape[0])

    @property
    def d(self) -> int:
        """Return the number of covariates."""
        return int(self.covariates[0].shape[1])

    @property
    def group_sizes(self) -> List[int]:
        """Return the number of observations of each group."""
        return [int(response.shape[1]) for response in self.responses]

    @property
    def n(self) -> int:
        """Return the total number of observations."""
        return sum(self.group_sizes)


def validate_regression_sample(
    responses: Sequence[ArrayLike],
    covariates: Sequence[ArrayLike],
    labels: Optional[Sequence[Hashable]] = None,
) -> RegressionSample:
    """Build a RegressionSample checking the shapes of the groups.

    Args:
        responses: One (p, n_k) response matrix per group.
        covariates: One (n_k, d) covariate matrix per group. Vectors are read as
            a single covariate.
        labels: Label of each group, defaults to 1, ..., K.

    Raises:
        TooFewGroupsError: if there are less than two groups.
        LabelMismatchError: if the shapes of the matrices don't agree.
        EmptyGroupError: if a group doesn't have more observations than
            covariates or has less than two observations.
        NonFiniteDataError: if there are NaN or infinite entries.
    """
    if len(responses) < 2:
        raise TooFewGroupsError(f"At least two groups are needed, got {len(responses)}")
    if len(responses) != len(covariates):
        raise LabelMismatchError(
            f"There are {len(responses)} response groups "
            f"and {len(covariates)} covariate groups"
        )
    if labels is None:
        group_labels: Tuple[Hashable, ...] = tuple(range(1, len(responses) + 1))
    else:
        group_labels = tuple(labels)
    if len(group_labels) != len(responses) or len(set(group_labels)) != len(responses):
        raise LabelMismatchError(
            f"There are {len(group_labels)} labels for {len(responses)} groups, "
            "one distinct label per group is needed"
        )

    checked_responses: List[FloatArray] = []
    checked_covariates: List[FloatArray] = []
    for label, response, covariate in zip(group_labels, responses, covariates):
        x_matrix = np.array(response, dtype=np.float64)
        w_matrix = np.array(covariate, dtype=np.float64)
        if x_matrix.ndim == 1:
            x_matrix = x_matrix.reshape(1, -1)
        if w_matrix.ndim == 1:
            w_matrix = w_matrix.reshape(-1, 1)
        if x_matrix.shape[1] != w_matrix.shape[0]:
            raise LabelMismatchError(
                f"The group {label} has {x_matrix.shape[1]} responses "
                f"and {w_matrix.shape[0]} covariate rows"
            )
        if not (np.all(np.isfinite(x_matrix)) and np.all(np.isfinite(w_matrix))):
            raise NonFiniteDataError(f"The group {label} contains non finite values")
        if x_matrix.shape[1] < 2 or x_matrix.shape[1] <= w_matrix.shape[1]:
            raise EmptyGroupError(
                f"The group {label} has {x_matrix.shape[1]} observations, it needs "
                f"more than the {w_matrix.shape[1]} covariates and at least 2"
            )
        checked_responses.append(_freeze(x_matrix))
        checked_covariates.append(_freeze(w_matrix))

    if len({response.shape[0] for response in checked_responses}) != 1:
        raise LabelMismatchError("All the groups must have the same number of features")
    if len({covariate.shape[1] for covariate in checked_covariates}) != 1:
        raise LabelMismatchError(
            "All the groups must have the same number of covariates"
        )

    return RegressionSample(
        responses=tuple(checked_responses),
        covariates=tuple(checked_covariates),
        labels=group_labels,
    )


class TestConfig(BaseModel):
    """Define the tuning parameters of a test run.

    Attributes:
        tau: Explicit connectivity threshold, overrides tau_quantile when set.
        tau_quantile: Quantile of the pairwise distances used as threshold.
        alpha: Significance level.
        mc_outer: Number B of Monte Carlo replicates of the critical value.
        mc_inner: Number N of Gaussian draws per replicate.
        seed: Seed of the Monte Carlo calibration.
        ridge: Relative eigenvalue floor used to compute the inverse square root.
        threads: Number of workers used by the Monte Carlo calibration.
        diagnostics: Attach the power diagnostics to the report.
    """

    # Pytest collects the classes that start with Test.
    __test__ = False

    tau: Optional[float] = Field(None, gt=0)
    tau_quantile: float = Field(0.5, gt=0, lt=1)
    alpha: float = Field(0.05, gt=0, lt=1)
    mc_outer: int = Field(100, ge=1)
    mc_inner: int = Field(200, ge=2)
    seed: int = Field(0, ge=0, lt=2**64)
    ridge: float = Field(1e-10, gt=0, lt=1)
    threads: int = Field(1, ge=1)
    diagnostics: bool = False

    class Config:
        """Configure the pydantic model."""

        allow_mutation = False
        extra = "forbid"


Decision = Literal["reject", "retain"]


class TestReport(BaseModel):
    """Gather the outcome of a MOD or CA-MOD test run."""

    __test__ = False

    method: Literal["mod", "camod"]
    statistic: float
    centered_statistic: Optional[float] = None
    p_value: float = Field(..., ge=0, le=1)
    p_mod_replicated: Optional[float] = Field(None, ge=0, le=1)
    critical_value: float
    decision: Decision
    alpha: float
    tau: float
    tau_quantile: Optional[float] = None
    p0_hat: float
    p12_hat: float
    n: int
    p: int
    k: int
    group_sizes: List[int]
    regression: bool = False
    d: Optional[int] = None
    pd_clipped: bool = False
    seed: int
    version: str = __version__
    p12_normalizer: str = "(n-1)(n-2)"
    warnings: List[str] = Field(default_factory=list)
    nu_hat: Optional[List[float]] = None
    omega_hat: Optional[List[float]] = None

    class Config:
        """Configure the pydantic model."""

        allow_mutation = False

    @validator("statistic", "critical_value", "tau")
    def _check_finite(cls, value: float) -> float:
        """Reject non finite summaries, they can't be serialized as JSON."""
        if not np.isfinite(value):
            raise ValueError("must be finite")
        return value

    @property
    def rejected(self) -> bool:
        """Return whether the null hypothesis was rejected."""
        return self.decision == "reject"


def decision_from(reject: bool) -> Decision:
    """Translate a boolean rejection into the report vocabulary."""
    return "reject" if reject else "retain"
