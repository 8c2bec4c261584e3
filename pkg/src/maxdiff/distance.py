"""Compute the pairwise distances and the connectivity graph of a pooled sample."""

import logging
import math
from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike
from scipy.spatial.distance import pdist, squareform

from .model import DegenerateStatisticError, FloatArray, PooledSample

log = logging.getLogger(__name__)


class DegenerateDistancesError(DegenerateStatisticError):
    """Raised when all the pairwise distances are zero."""


@dataclass(frozen=True, eq=False)
class DistanceMatrix:
    """Euclidean distances between every pair of observations.

    Attributes:
        condensed: Upper triangle of the matrix in the order used by scipy.
    """

    condensed: FloatArray

    @property
    def n(self) -> int:
        """Return the number of observations."""
        pairs = len(self.condensed)
        return int(round((1 + math.sqrt(1 + 8 * pairs)) / 2))

    @property
    def square(self) -> FloatArray:
        """Return the symmetric (n, n) matrix with zero diagonal."""
        return squareform(self.condensed, checks=False)


@dataclass(frozen=True, eq=False)
class ConnectivityGraph:
    """Adjacency of the pairs closer than the threshold.

    Attributes:
        adjacency: Symmetric 0/1 matrix with zero diagonal.
        tau: Threshold that generated the graph.
    """

    adjacency: FloatArray
    tau: float

    @property
    def n(self) -> int:
        """Return the number of observations."""
        return int(self.adjacency.shape[0])

    @property
    def degrees(self) -> FloatArray:
        """Return the number of neighbours of each observation."""
        return self.adjacency.sum(axis=1)


def pairwise_distances(sample: PooledSample) -> DistanceMatrix:
    """Compute the L2 distance of every unordered pair of observations."""
    condensed = pdist(sample.data.T, metric="euclidean")
    condensed.setflags(write=False)
    return DistanceMatrix(condensed=condensed)


def lower_quantile(values: ArrayLike, quantile: float) -> float:
    """Return the ceil(q M)-th smallest of the M values.

    The result is always one of the values, so thresholding with `<=` at it is
    deterministic.

    Examples:
    >>> lower_quantile([3, 1, 2], 0.5)
    2.0
    """
    array = np.asarray(values, dtype=np.float64).ravel()
    if array.size == 0:
        raise ValueError("Can't compute the quantile of an empty set of values")
    # Rounding before the ceil keeps q M = 2.0000000000000004 at rank 2.
    rank = max(1, math.ceil(round(quantile * array.size, 9)))
    rank = min(rank, array.size)
    return float(np.partition(array, rank - 1)[rank - 1])


def select_tau(dmat: DistanceMatrix, quantile: float = 0.5) -> float:
    """Select the connectivity threshold as a lower quantile of the distances.

    Raises:
        DegenerateDistancesError: if every pairwise distance is zero.
    """
    if dmat.condensed.size == 0 or float(np.max(dmat.condensed)) == 0:
        raise DegenerateDistancesError(
            "All the pairwise distances are zero, every pair would be connected"
        )
    tau = lower_quantile(dmat.condensed, quantile)
    log.debug(f"Selected tau {tau:.6g} at the {quantile} quantile of the distances")
    return tau


def connectivity(dmat: DistanceMatrix, tau: float) -> ConnectivityGraph:
    """Connect the pairs of observations whose distance is at most tau."""
    adjacency = squareform((dmat.condensed <= tau).astype(np.float64), checks=False)
    adjacency.setflags(write=False)
    return ConnectivityGraph(adjacency=adjacency, tau=float(tau))
