"""Scan candidate quantiles to choose the connectivity threshold.

The objective of a quantile xi is f^2(tau^2) / (xi (1 - xi) - sum_kl g_k g_l p_kl)
where f is a histogram estimate of the density of the squared distances and
tau the xi quantile of the distances. The tests don't run the scan, they use
the median.
"""

import logging
from dataclasses import dataclass
from typing import Sequence, Tuple

import numpy as np
from numpy.typing import ArrayLike

from .distance import DistanceMatrix, connectivity, pairwise_distances, select_tau
from .mod import connection_frequencies
from .model import DegenerateStatisticError, FloatArray, InputError, PooledSample

log = logging.getLogger(__name__)

DEFAULT_GRID = (0.25, 0.5, 0.75)
MIN_OBSERVATIONS = 20


class NonFiniteObjectiveError(DegenerateStatisticError):
    """Raised when no candidate quantile has a finite objective."""


@dataclass(frozen=True, eq=False)
class TauScan:
    """Objective of every candidate quantile.

    Attributes:
        grid: Candidate quantiles.
        taus: Threshold of each candidate.
        objective: Objective of each candidate, -inf when it's not defined.
        selected: Quantile with the largest objective.
    """

    grid: FloatArray
    taus: FloatArray
    objective: FloatArray
    selected: float

    @property
    def selected_tau(self) -> float:
        """Return the threshold of the selected quantile."""
        return float(self.taus[np.flatnonzero(self.grid == self.selected)[0]])


def squared_distance_density(dmat: DistanceMatrix) -> Tuple[FloatArray, FloatArray]:
    """Return the heights and bin edges of the squared distance histogram.

    The bins follow the Freedman Diaconis rule.
    """
    return np.histogram(dmat.condensed**2, bins="fd", density=True)


def density_at(heights: FloatArray, edges: FloatArray, value: float) -> float:
    """Evaluate the histogram density at value."""
    index = int(np.searchsorted(edges, value, side="right")) - 1
    return float(heights[min(max(index, 0), len(heights) - 1)])


def select_quantile(grid: ArrayLike, objective: ArrayLike) -> float:
    """Return the candidate with the largest objective.

    Ties go to the candidate closest to 0.5, and then to the smaller one.

    Raises:
        NonFiniteObjectiveError: if no objective is finite.
    """
    candidates = np.asarray(grid, dtype=np.float64)
    values = np.asarray(objective, dtype=np.float64)
    finite = np.isfinite(values)
    if not finite.any():
        raise NonFiniteObjectiveError(
            "The objective is not defined for any of the candidate quantiles"
        )
    best = values[finite].max()
    tied = candidates[finite & np.isclose(values, best, rtol=1e-12, atol=0)]
    return float(min(tied, key=lambda xi: (abs(xi - 0.5), xi)))


def scan_tau(sample: PooledSample, grid: Sequence[float] = DEFAULT_GRID) -> TauScan:
    """Evaluate the tuning objective for every candidate quantile.

    Raises:
        InputError: if there are less than 20 observations or the grid leaves
            [0.05, 0.95].
        DegenerateDistancesError: if every distance is zero.
        NonFiniteObjectiveError: if no candidate has a positive denominator.
    """
    if sample.n < MIN_OBSERVATIONS:
        raise InputError(
            f"The tau scan needs at least {MIN_OBSERVATIONS} observations, "
            f"got {sample.n}"
        )
    candidates = np.asarray(grid, dtype=np.float64)
    if candidates.size == 0 or candidates.min() < 0.05 or candidates.max() > 0.95:
        raise InputError("The candidate quantiles must lie in [0.05, 0.95]")

    dmat = pairwise_distances(sample)
    taus = np.array([select_tau(dmat, float(quantile)) for quantile in candidates])
    heights, edges = squared_distance_density(dmat)
    gamma = sample.group_sizes / sample.n

    objective = np.full(candidates.size, -np.inf)
    for index, (quantile, tau) in enumerate(zip(candidates, taus)):
        _, p_gkl = connection_frequencies(connectivity(dmat, tau), sample)
        averaged = np.tensordot(gamma, p_gkl, axes=1)
        denominator = quantile * (1 - quantile) - float(gamma @ averaged @ gamma)
        if denominator > 0:
            objective[index] = density_at(heights, edges, tau**2) ** 2 / denominator
        log.debug(
            f"Quantile {quantile}: tau {tau:.6g}, objective {objective[index]:.6g}"
        )

    selected = select_quantile(candidates, objective)
    log.info(f"Selected the {selected} quantile of the distances")
    return TauScan(grid=candidates, taus=taus, objective=objective, selected=selected)
