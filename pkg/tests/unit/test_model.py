"""Test the validation of the samples and the test configuration."""

import numpy as np
import pytest
from pydantic import ValidationError

from maxdiff.model import (
    EmptyGroupError,
    InputError,
    LabelMismatchError,
    NonFiniteDataError,
    TestConfig,
    TestReport,
    TooFewGroupsError,
    decision_from,
    validate_regression_sample,
    validate_sample,
)


def test_validate_sample_encodes_labels_by_first_appearance() -> None:
    """
    Given: A matrix with labels that are not sorted.
    When: validate_sample is called.
    Then: The groups are numbered in order of first appearance.
    """
    data = np.arange(10.0).reshape(2, 5)

    result = validate_sample(data, ["b", "a", "b", "a", "a"])

    assert result.groups.tolist() == [1, 2, 1, 2, 2]
    assert result.group_sizes.tolist() == [2, 3]
    assert result.labels == ("b", "a")
    assert (result.n, result.p, result.k) == (5, 2, 2)


def test_validate_sample_reads_vectors_as_one_feature() -> None:
    """A vector of observations becomes a single feature row."""
    result = validate_sample([1, 2, 3, 4], np.array([1, 1, 2, 2]))

    assert result.data.shape == (1, 4)
    assert result.labels == (1, 2)


def test_sample_is_read_only() -> None:
    """The arrays of a validated sample can't be modified."""
    sample = validate_sample([1, 2, 3, 4], [1, 1, 2, 2])

    with pytest.raises(ValueError, match="read-only"):
        sample.data[0, 0] = 10


def test_membership_is_one_hot() -> None:
    """Each row of the membership matrix marks the group of the observation."""
    sample = validate_sample([1, 2, 3, 4, 5], [1, 2, 1, 2, 2])

    result = sample.membership()

    assert result.tolist() == [[1, 0], [0, 1], [1, 0], [0, 1], [0, 1]]
    assert sample.own_group_sizes().tolist() == [2, 3, 2, 3, 3]
    assert sample.members(1).tolist() == [0, 2]


def test_validate_sample_is_idempotent() -> None:
    """
    Given: A sample validated from unsorted string labels.
    When: Its data and encoded groups are validated again.
    Then: The groups, group sizes and data don't change.
    """
    labels = ["b", "b", "a", "a", "c", "c", "b", "a"]
    sample = validate_sample(np.arange(16.0).reshape(2, 8), labels)

    result = validate_sample(sample.data, sample.groups)

    assert result.groups.tolist() == sample.groups.tolist()
    assert result.group_sizes.tolist() == sample.group_sizes.tolist()
    np.testing.assert_array_equal(result.data, sample.data)


def test_validate_sample_preserves_the_partition() -> None:
    """Two observations share a group exactly when they shared a label."""
    rng = np.random.default_rng(5)
    labels = rng.permutation(["red"] * 7 + ["green"] * 5 + ["blue"] * 9).tolist()

    result = validate_sample(rng.standard_normal((3, len(labels))), labels)

    for first, second in zip(*np.triu_indices(len(labels), k=1)):
        assert (result.groups[first] == result.groups[second]) == (
            labels[first] == labels[second]
        )


@pytest.mark.parametrize(
    ("data", "labels", "error"),
    [
        ([[1, 2], [3]], [1, 2], InputError),
        ([1, 2, 3, 4], [1, 1, 2], LabelMismatchError),
        ([1, 2, float("nan"), 4], [1, 1, 2, 2], NonFiniteDataError),
        ([1, 2, float("inf"), 4], [1, 1, 2, 2], NonFiniteDataError),
        ([1, 2, 3, 4], [1, 1, 1, 1], TooFewGroupsError),
        ([1, 2, 3, 4], [1, 1, 1, 2], EmptyGroupError),
        (np.zeros((2, 2, 2)), [1, 1], InputError),
    ],
)
def test_validate_sample_rejects_invalid_input(
    data: object, labels: object, error: type
) -> None:
    """
    Given: Data that breaks an invariant of the K-sample problem.
    When: validate_sample is called.
    Then: The matching input error is raised.
    """
    with pytest.raises(error):
        validate_sample(data, labels)  # type: ignore


def test_validate_regression_sample_happy_path() -> None:
    """
    Given: Two groups with the same number of features and covariates.
    When: validate_regression_sample is called.
    Then: Vectors of covariates become a single column.
    """
    result = validate_regression_sample(
        [np.ones((3, 4)), np.ones((3, 5))],
        [np.arange(4.0), np.arange(5.0)],
        ["x", "y"],
    )

    assert result.k == 2
    assert result.p == 3
    assert result.d == 1
    assert result.group_sizes == [4, 5]
    assert result.n == 9
    assert result.labels == ("x", "y")


def test_validate_regression_sample_defaults_labels() -> None:
    """Without labels the groups are numbered from 1."""
    result = validate_regression_sample(
        [np.ones((2, 3)), np.ones((2, 3))], [np.ones((3, 1)), np.ones((3, 1))]
    )

    assert result.labels == (1, 2)


@pytest.mark.parametrize(
    ("responses", "covariates", "labels", "error"),
    [
        ([np.ones((2, 3))], [np.ones((3, 1))], None, TooFewGroupsError),
        (
            [np.ones((2, 3)), np.ones((2, 3))],
            [np.ones((3, 1))],
            None,
            LabelMismatchError,
        ),
        (
            [np.ones((2, 3)), np.ones((2, 3))],
            [np.ones((3, 1)), np.ones((3, 1))],
            ["a", "a"],
            LabelMismatchError,
        ),
        (
            [np.ones((2, 3)), np.ones((2, 4))],
            [np.ones((3, 1)), np.ones((3, 1))],
            None,
            LabelMismatchError,
        ),
        (
            [np.ones((2, 2)), np.ones((2, 3))],
            [np.ones((2, 2)), np.ones((3, 2))],
            None,
            EmptyGroupError,
        ),
        (
            [np.full((2, 3), np.nan), np.ones((2, 3))],
            [np.ones((3, 1)), np.ones((3, 1))],
            None,
            NonFiniteDataError,
        ),
        (
            [np.ones((2, 3)), np.ones((3, 3))],
            [np.ones((3, 1)), np.ones((3, 1))],
            None,
            LabelMismatchError,
        ),
        (
            [np.ones((2, 4)), np.ones((2, 4))],
            [np.ones((4, 1)), np.ones((4, 2))],
            None,
            LabelMismatchError,
        ),
    ],
)
def test_validate_regression_sample_rejects_invalid_input(
    responses: list, covariates: list, labels: object, error: type
) -> None:
    """Inconsistent regression groups raise the matching input error."""
    with pytest.raises(error):
        validate_regression_sample(responses, covariates, labels)  # type: ignore


def test_test_config_defaults() -> None:
    """The default configuration uses the median distance and 100 x 200 draws."""
    result = TestConfig()

    assert result.tau is None
    assert result.tau_quantile == 0.5
    assert result.alpha == 0.05
    assert (result.mc_outer, result.mc_inner) == (100, 200)
    assert result.ridge == 1e-10


@pytest.mark.parametrize(
    "values",
    [
        {"alpha": 0},
        {"alpha": 1},
        {"tau_quantile": 1.5},
        {"tau": 0},
        {"mc_inner": 1},
        {"mc_outer": 0},
        {"seed": -1},
        {"threads": 0},
        {"unknown": 1},
    ],
)
def test_test_config_rejects_invalid_values(values: dict) -> None:
    """Out of range or unknown options are rejected."""
    with pytest.raises(ValidationError):
        TestConfig(**values)


def test_test_config_is_immutable() -> None:
    """The configuration can't be changed once built."""
    config = TestConfig()

    with pytest.raises(TypeError):
        config.alpha = 0.1  # type: ignore


def test_report_rejects_non_finite_statistics() -> None:
    """A report with an infinite statistic can't be built."""
    with pytest.raises(ValidationError, match="must be finite"):
        TestReport(
            method="mod",
            statistic=float("inf"),
            p_value=0.5,
            critical_value=1.0,
            decision="retain",
            alpha=0.05,
            tau=1.0,
            p0_hat=0.5,
            p12_hat=0.0,
            n=4,
            p=1,
            k=2,
            group_sizes=[2, 2],
            seed=0,
        )


def test_decision_from() -> None:
    """Booleans are translated into the report vocabulary."""
    assert decision_from(True) == "reject"
    assert decision_from(False) == "retain"
