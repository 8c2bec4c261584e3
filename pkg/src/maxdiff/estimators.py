"""Estimate the connection probabilities of the connectivity graph.

The per observation quantities are evaluated with row sums of the adjacency
matrix. For a centered row delta_i the double sum over m != j of
delta_im delta_ij equals (sum delta_i)^2 - sum delta_i^2, so nothing here is
worse than O(n^2).
"""

import logging
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from .distance import ConnectivityGraph
from .model import FloatArray, PooledSample

log = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class ConnectionProbabilities:
    """Connection probability estimates of a graph.

    Attributes:
        p_bet: Fraction of the other group observations connected to each i.
        p_in: Fraction of the own group observations connected to each i.
        p0_i: Fraction of all the other observations connected to each i.
        p12_i: Covariance of two connections that share the observation i.
        p0: Global connection probability.
        p12: Global covariance of two connections sharing an observation.
        p22: Variance of a single connection, p0 (1 - p0).
    """

    p_bet: FloatArray
    p_in: FloatArray
    p0_i: FloatArray
    p12_i: FloatArray
    p0: float
    p12: float
    p22: float


def within_between(
    graph: ConnectivityGraph, sample: PooledSample
) -> Tuple[FloatArray, FloatArray]:
    """Return the between and within group connection proportions of each i."""
    per_group = graph.adjacency @ sample.membership()
    rows = np.arange(sample.n)
    own = per_group[rows, sample.groups - 1]
    own_sizes = sample.own_group_sizes()
    p_in = own / (own_sizes - 1)
    p_bet = (graph.degrees - own) / (sample.n - own_sizes)
    return p_bet, p_in


def _centered_cross_sum(degrees: FloatArray, p0: FloatArray, n: int) -> FloatArray:
    """Return sum over m != j, both != i, of delta_im delta_ij for each row i.

    Each row has `degrees` entries equal to 1 - p0 and the rest equal to -p0.
    """
    first = degrees - (n - 1) * p0
    second = degrees * (1 - p0) ** 2 + (n - 1 - degrees) * p0**2
    return first**2 - second


def p0_p12_per_i(graph: ConnectivityGraph) -> Tuple[FloatArray, FloatArray]:
    """Return the per observation connection probability and its covariance term.

    The covariance sum is normalized by its exact number of terms, (n-1)(n-2).
    """
    n = graph.n
    degrees = graph.degrees
    p0_i = degrees / (n - 1)
    p12_i = _centered_cross_sum(degrees, p0_i, n) / ((n - 1) * (n - 2))
    return p0_i, p12_i


def p0_p12_global(graph: ConnectivityGraph) -> Tuple[float, float, float]:
    """Return the global p0, p12 and p22 = p0 (1 - p0) of the graph."""
    n = graph.n
    degrees = graph.degrees
    p0 = float(degrees.sum() / (n * (n - 1)))
    cross = _centered_cross_sum(degrees, np.full(n, p0), n)
    p12 = float(cross.sum() / (n * (n - 1) * (n - 2)))
    return p0, p12, p0 * (1 - p0)


def connection_probabilities(
    graph: ConnectivityGraph, sample: PooledSample
) -> ConnectionProbabilities:
    """Gather all the connection probability estimates of the graph."""
    p_bet, p_in = within_between(graph, sample)
    p0_i, p12_i = p0_p12_per_i(graph)
    p0, p12, p22 = p0_p12_global(graph)
    log.debug(f"Connection probabilities p0={p0:.6g}, p12={p12:.6g}, p22={p22:.6g}")
    return ConnectionProbabilities(
        p_bet=p_bet,
        p_in=p_in,
        p0_i=p0_i,
        p12_i=p12_i,
        p0=p0,
        p12=p12,
        p22=p22,
    )
