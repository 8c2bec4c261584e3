"""Test the covariance adjusted statistic and its extreme value calibration."""

import math

import numpy as np
import pytest
from scipy.stats import ortho_group

from maxdiff.camod import (
    camod_statistic,
    camod_test,
    gumbel_centering,
    gumbel_critical,
    gumbel_pvalue,
)
from maxdiff.covariance import inv_sqrt
from maxdiff.mod import ModComponents, mod_test
from maxdiff.model import PooledSample, TestConfig, validate_sample


def _components(*values: float) -> ModComponents:
    """Build differences with unit variance terms."""
    return ModComponents(t=np.array(values), variance_terms=np.ones(len(values)))


def test_identity_adjustment_keeps_the_statistic() -> None:
    """Without correlations the adjusted and raw statistics coincide."""
    components = _components(0.5, -2.0, 1.0)

    result = camod_statistic(components, np.eye(3))

    assert result.statistic == components.statistic == 4.0


def test_zero_differences_give_a_zero_statistic() -> None:
    """Decorrelating zeros gives zeros."""
    result = camod_statistic(_components(0, 0), np.eye(2))

    assert result.statistic == 0


def test_camod_statistic_of_correlated_pair() -> None:
    """
    Given: Two differences equal to 1 with correlation 0.5.
    When: camod_statistic is called.
    Then: The sum direction is scaled by 1/sqrt(1.5) so the statistic is 2/3.
    """
    root, _ = inv_sqrt(np.array([[1, 0.5], [0.5, 1]]))

    result = camod_statistic(_components(1, 1), root)

    np.testing.assert_allclose(result.m, [1 / math.sqrt(1.5)] * 2)
    assert result.statistic == pytest.approx(2 / 3)


def test_camod_statistic_rejects_mismatched_shapes() -> None:
    """The inverse square root must match the number of differences."""
    with pytest.raises(ValueError, match="shape"):
        camod_statistic(_components(1, 1), np.eye(3))


def test_gumbel_centering() -> None:
    """The centering subtracts 2 log n and adds log log n."""
    n = 100

    assert gumbel_centering(2 * math.log(n) - math.log(math.log(n)), n) == (
        pytest.approx(0, abs=1e-12)
    )
    assert gumbel_centering(1.0, 2) == pytest.approx(
        1 - 2 * 0.693147 + math.log(0.693147), abs=1e-5
    )
    assert gumbel_centering(2.0, 50) > gumbel_centering(1.0, 50)


@pytest.mark.parametrize(
    ("alpha", "expected"),
    [(0.05, 4.7957), (0.01, 8.0557), (1 - math.exp(-1 / math.sqrt(math.pi)), 0.0)],
)
def test_gumbel_critical(alpha: float, expected: float) -> None:
    """The critical values follow the closed form quantile."""
    result = gumbel_critical(alpha)

    assert result == pytest.approx(expected, abs=1e-3)


@pytest.mark.parametrize(
    ("centered", "expected"),
    [(4.7957, 0.05), (-math.log(math.pi), 1 - math.exp(-1)), (1e3, 0.0)],
)
def test_gumbel_pvalue(centered: float, expected: float) -> None:
    """The p-value is the upper tail of the limit law."""
    result = gumbel_pvalue(centered)

    assert result == pytest.approx(expected, abs=1e-4)


def test_gumbel_pvalue_inverts_the_critical_value() -> None:
    """The critical value of alpha has p-value alpha."""
    for alpha in np.linspace(0.01, 0.99, 99):
        assert gumbel_pvalue(gumbel_critical(alpha)) == pytest.approx(alpha, abs=1e-12)


@pytest.mark.parametrize("alpha", [0, 1, -0.5])
def test_gumbel_critical_rejects_invalid_levels(alpha: float) -> None:
    """The significance level must lie strictly between 0 and 1."""
    with pytest.raises(ValueError, match="significance level"):
        gumbel_critical(alpha)


def test_camod_test_of_separated_clusters(toy: PooledSample) -> None:
    """
    Given: The toy sample connected below 1.
    When: camod_test is called.
    Then: The equal differences -sqrt(2) are scaled by the top eigenvalue 8/3.
    """
    config = TestConfig(tau=1.0)

    result = camod_test(toy, config)

    assert result.method == "camod"
    assert result.statistic == pytest.approx(0.75)
    assert result.centered_statistic == pytest.approx(
        0.75 - 2 * math.log(4) + math.log(math.log(4))
    )
    assert result.critical_value == pytest.approx(4.7957, abs=1e-3)
    assert result.decision == "retain"
    assert result.p_mod_replicated is None
    assert not result.pd_clipped


def test_camod_test_rejects_a_mean_shift(
    shifted_sample: PooledSample, test_config: TestConfig
) -> None:
    """A large mean shift is detected by the adjusted statistic."""
    result = camod_test(shifted_sample, test_config)

    assert result.decision == "reject"
    assert result.p_value <= 0.05


def test_camod_decision_agrees_with_its_pvalue(
    null_sample: PooledSample, test_config: TestConfig
) -> None:
    """Rejecting by critical value is the same as rejecting by p-value."""
    result = camod_test(null_sample, test_config)

    assert result.centered_statistic is not None
    assert (result.centered_statistic >= result.critical_value) == (
        result.p_value <= result.alpha
    )
    assert result.rejected == (result.p_value <= result.alpha)


def test_camod_and_mod_share_the_pipeline(
    null_sample: PooledSample, test_config: TestConfig
) -> None:
    """Both tests report the same threshold and connection probabilities."""
    camod = camod_test(null_sample, test_config)
    mod = mod_test(null_sample, test_config)

    assert camod.tau == mod.tau
    assert camod.p0_hat == mod.p0_hat
    assert camod.p12_hat == mod.p12_hat


def test_camod_test_is_invariant_to_rotations_and_translations(
    null_sample: PooledSample, test_config: TestConfig
) -> None:
    """
    Given: The null sample rotated by a random orthogonal matrix and shifted.
    When: camod_test is called on both samples.
    Then: The statistic, the p-value and the decision don't change.
    """
    rotation = ortho_group.rvs(null_sample.p, random_state=3)
    moved = validate_sample(rotation @ null_sample.data - 2.5, null_sample.groups)

    result = camod_test(moved, test_config)

    expected = camod_test(null_sample, test_config)
    assert result.statistic == pytest.approx(expected.statistic, rel=1e-8)
    assert result.p_value == pytest.approx(expected.p_value, rel=1e-8)
    assert result.decision == expected.decision
