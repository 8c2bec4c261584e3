"""Test the connection probability estimators."""

import numpy as np
import pytest

from maxdiff.distance import ConnectivityGraph, connectivity, pairwise_distances
from maxdiff.estimators import (
    connection_probabilities,
    p0_p12_global,
    p0_p12_per_i,
    within_between,
)
from maxdiff.model import PooledSample
from tests.brute_force import naive_p12


@pytest.fixture(name="toy_graph")
def toy_graph_(toy: PooledSample) -> ConnectivityGraph:
    """Connect the points of the toy sample closer than 1."""
    return connectivity(pairwise_distances(toy), 1.0)


def test_within_between_of_separated_clusters(
    toy: PooledSample, toy_graph: ConnectivityGraph
) -> None:
    """Every point is only connected to its own group."""
    p_bet, p_in = within_between(toy_graph, toy)

    assert p_in.tolist() == [1, 1, 1, 1]
    assert p_bet.tolist() == [0, 0, 0, 0]


def test_within_between_of_saturated_graphs(toy: PooledSample) -> None:
    """The complete graph gives ones and the empty graph zeros."""
    dmat = pairwise_distances(toy)

    complete = within_between(connectivity(dmat, 100.0), toy)
    empty = within_between(connectivity(dmat, 0.1), toy)

    assert all(np.all(values == 1) for values in complete)
    assert all(np.all(values == 0) for values in empty)


def test_p0_p12_per_i_of_the_toy_sample(toy_graph: ConnectivityGraph) -> None:
    """
    Given: The toy graph where every point has one neighbour out of three.
    When: p0_p12_per_i is called.
    Then: p0 is 1/3 and the centered cross sum (0 - 2/3) / 6 gives -1/9.
    """
    p0_i, p12_i = p0_p12_per_i(toy_graph)

    np.testing.assert_allclose(p0_i, 1 / 3)
    np.testing.assert_allclose(p12_i, -1 / 9)


@pytest.mark.parametrize("tau", [0.1, 100.0])
def test_p0_p12_per_i_of_saturated_graphs(toy: PooledSample, tau: float) -> None:
    """Without variability in the connections the covariance term is zero."""
    graph = connectivity(pairwise_distances(toy), tau)

    p0_i, p12_i = p0_p12_per_i(graph)

    assert np.all(p0_i == (1.0 if tau > 1 else 0.0))
    np.testing.assert_allclose(p12_i, 0, atol=1e-15)


def test_p0_p12_global_of_the_toy_sample(toy_graph: ConnectivityGraph) -> None:
    """The global estimates match the hand computation."""
    p0, p12, p22 = p0_p12_global(toy_graph)

    assert p0 == pytest.approx(1 / 3)
    assert p12 == pytest.approx(-1 / 9)
    assert p22 == pytest.approx(2 / 9)


def test_closed_form_p12_matches_the_triple_loop() -> None:
    """
    Given: 50 random graphs of up to 30 observations.
    When: p0_p12_global is called.
    Then: p12 equals the literal triple sum.
    """
    rng = np.random.default_rng(11)
    for _ in range(50):
        n = int(rng.integers(3, 31))
        upper = np.triu(rng.random((n, n)) < rng.uniform(0.1, 0.9), k=1)
        adjacency = (upper | upper.T).astype(np.float64)
        graph = ConnectivityGraph(adjacency=adjacency, tau=1.0)

        p0, p12, _ = p0_p12_global(graph)

        assert p12 == pytest.approx(naive_p12(adjacency, p0), abs=1e-12)


def test_connection_probabilities_gathers_the_estimates(
    toy: PooledSample, toy_graph: ConnectivityGraph
) -> None:
    """The global p0 is the mean of the per observation ones."""
    result = connection_probabilities(toy_graph, toy)

    assert result.p0 == pytest.approx(result.p0_i.mean())
    assert result.p22 == result.p0 * (1 - result.p0)
    assert result.p_in.tolist() == [1, 1, 1, 1]


def test_probabilities_are_invariant_to_permutations(null_sample: PooledSample) -> None:
    """Reordering the observations reorders the per observation estimates."""
    order = np.random.default_rng(2).permutation(null_sample.n)
    permuted = PooledSample(
        data=null_sample.data[:, order],
        groups=null_sample.groups[order],
        group_sizes=null_sample.group_sizes,
        labels=null_sample.labels,
    )
    dmat = pairwise_distances(null_sample)
    permuted_dmat = pairwise_distances(permuted)

    result = connection_probabilities(connectivity(permuted_dmat, 4.0), permuted)

    expected = connection_probabilities(connectivity(dmat, 4.0), null_sample)
    np.testing.assert_allclose(result.p_bet, expected.p_bet[order])
    np.testing.assert_allclose(result.p12_i, expected.p12_i[order])
    assert result.p12 == pytest.approx(expected.p12)


@pytest.mark.parametrize("quantile", [0.1, 0.5, 0.9])
def test_within_and_between_counts_add_up_to_the_degree(
    null_sample: PooledSample, quantile: float
) -> None:
    """
    Given: Graphs of the null sample at several thresholds.
    When: within_between and p0_p12_per_i are called.
    Then: The within and between neighbours of each observation sum to its degree.
    """
    dmat = pairwise_distances(null_sample)
    graph = connectivity(dmat, float(np.quantile(dmat.condensed, quantile)))
    own_sizes = null_sample.own_group_sizes()

    p_bet, p_in = within_between(graph, null_sample)

    p0_i, _ = p0_p12_per_i(graph)
    np.testing.assert_allclose(
        (null_sample.n - own_sizes) * p_bet + (own_sizes - 1) * p_in,
        (null_sample.n - 1) * p0_i,
        rtol=1e-12,
    )
