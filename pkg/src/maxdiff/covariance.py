"""Build the group structured covariance of the standardized differences.

The covariance of two observations only depends on their groups, so it's
stored as one within value per group and one between value per pair of groups.
"""

import logging
from dataclasses import dataclass
from typing import Optional, Tuple, Union

import numpy as np
import scipy.linalg
from numpy.typing import ArrayLike

from .model import DegenerateStatisticError, FloatArray, IntArray, NumericalError

log = logging.getLogger(__name__)

Seed = Union[int, np.random.SeedSequence]


class DegenerateVarianceError(DegenerateStatisticError):
    """Raised when a variance term of the statistic is not positive.

    Attributes:
        observation: Index of the first offending observation, if known.
    """

    def __init__(self, message: str, observation: Optional[int] = None) -> None:
        """Store the offending observation."""
        super().__init__(message)
        self.observation = observation


class EigenFailureError(NumericalError):
    """Raised when the eigendecomposition of the covariance fails."""


@dataclass(frozen=True, eq=False)
class GroupStructuredCovariance:
    """Compact form of an (n, n) covariance with unit diagonal.

    Attributes:
        groups: Group of each observation encoded as 1, ..., K.
        sizes: Number of observations of each group.
        within: Covariance of two distinct observations of group k.
        between: Symmetric (K, K) covariance of observations of groups k != l,
            with zero diagonal.
    """

    groups: IntArray
    sizes: IntArray
    within: FloatArray
    between: FloatArray

    @property
    def k(self) -> int:
        """Return the number of groups."""
        return len(self.sizes)

    @property
    def n(self) -> int:
        """Return the number of observations."""
        return int(self.sizes.sum())

    def blocks(self) -> FloatArray:
        """Return the (K, K) matrix of off diagonal values by pair of groups."""
        values = self.between.copy()
        np.fill_diagonal(values, self.within)
        return values


def estimate_sigma(
    p0: float,
    p12: float,
    sizes: ArrayLike,
    groups: Optional[ArrayLike] = None,
) -> GroupStructuredCovariance:
    """Plug the connection probabilities into the covariance of the differences.

    Args:
        p0: Global connection probability.
        p12: Covariance of two connections that share an observation.
        sizes: Number of observations of each group.
        groups: Group of each observation, defaults to contiguous blocks.

    Raises:
        DegenerateVarianceError: if p0 (1 - p0) - p12 is not positive.
    """
    group_sizes = np.asarray(sizes, dtype=np.int64)
    if groups is None:
        group_of = np.repeat(np.arange(1, len(group_sizes) + 1), group_sizes)
    else:
        group_of = np.asarray(groups, dtype=np.int64)
    n = int(group_sizes.sum())
    p22 = p0 * (1 - p0)
    spread = p22 - p12
    if spread <= 0:
        raise DegenerateVarianceError(
            f"The connection variance p22 - p12 = {spread:.3g} is not positive, "
            "the threshold connects all or none of the pairs"
        )

    sizes_f = group_sizes.astype(np.float64)
    scale = 1 / (n - sizes_f) + 1 / (sizes_f - 1)
    within = (scale * p12 - (3 * p12 - p22) / (sizes_f - 1) ** 2) / (scale * spread)

    weights = np.sqrt((sizes_f - 1) / (n - sizes_f))
    shared = (p22 - (n + 2) * p12) / ((n - 1) * spread)
    between = np.outer(weights, weights) * shared
    np.fill_diagonal(between, 0)

    return GroupStructuredCovariance(
        groups=group_of, sizes=group_sizes, within=within, between=between
    )


def materialize(cov: GroupStructuredCovariance) -> FloatArray:
    """Expand the compact covariance into the dense (n, n) matrix."""
    index = cov.groups - 1
    dense = cov.blocks()[np.ix_(index, index)]
    np.fill_diagonal(dense, 1.0)
    return dense


def _clipped_eigen(
    sigma: FloatArray, ridge: float
) -> Tuple[FloatArray, FloatArray, bool]:
    """Return the eigenbasis and the eigenvalues floored at ridge * max eigenvalue."""
    try:
        eigenvalues, eigenvectors = scipy.linalg.eigh(sigma)
    except (np.linalg.LinAlgError, ValueError) as error:
        raise EigenFailureError(
            f"The eigendecomposition did not converge: {error}"
        ) from error
    largest = float(eigenvalues.max())
    if not np.isfinite(largest) or largest <= 0:
        raise EigenFailureError(
            f"The covariance has no positive eigenvalue, the largest is {largest:.3g}"
        )
    floor = ridge * largest
    clipped = bool(np.any(eigenvalues < floor))
    if clipped:
        log.debug(
            f"Raised {int(np.sum(eigenvalues < floor))} eigenvalues to the floor "
            f"{floor:.3g}"
        )
    return eigenvectors, np.maximum(eigenvalues, floor), clipped


def inv_sqrt(sigma: ArrayLike, ridge: float = 1e-10) -> Tuple[FloatArray, bool]:
    """Compute the symmetric inverse square root of a covariance matrix.

    Returns:
        The matrix U diag(1 / sqrt(lambda)) U^T and whether any eigenvalue had
        to be raised to the ridge floor.

    Raises:
        EigenFailureError: if the decomposition fails or the matrix is not
            positive in any direction.
    """
    matrix = np.asarray(sigma, dtype=np.float64)
    eigenvectors, eigenvalues, clipped = _clipped_eigen(matrix, ridge)
    root = (eigenvectors / np.sqrt(eigenvalues)) @ eigenvectors.T
    return (root + root.T) / 2, clipped


class MaxSquareSampler:
    """Draw max_i Z_i^2 with Z a centered gaussian of the given covariance.

    The matrix is factorized once so every replicate only costs a matrix product.

    Attributes:
        factor: Lower triangular (or eigen) factor L with L L^T = sigma.
        clipped: Whether the eigen fallback had to floor eigenvalues.
    """

    def __init__(self, sigma: ArrayLike, ridge: float = 1e-10) -> None:
        """Factorize the covariance, falling back to its eigendecomposition."""
        matrix = np.asarray(sigma, dtype=np.float64)
        self.clipped = False
        try:
            self.factor = scipy.linalg.cholesky(matrix, lower=True)
        except np.linalg.LinAlgError:
            log.debug("The covariance is not positive definite, using its eigenbasis")
            eigenvectors, eigenvalues, self.clipped = _clipped_eigen(matrix, ridge)
            self.factor = eigenvectors * np.sqrt(eigenvalues)

    def draw(self, draws: int, seed: Seed) -> FloatArray:
        """Return the maximum squared coordinate of `draws` gaussian vectors."""
        rng = np.random.default_rng(seed)
        normal = rng.standard_normal((draws, self.factor.shape[0]))
        correlated = normal @ self.factor.T
        return np.max(correlated**2, axis=1)


def sample_max_sq(
    sigma: ArrayLike, draws: int, seed: Seed, ridge: float = 1e-10
) -> FloatArray:
    """Draw `draws` realizations of max_i Z_i^2 with Z ~ N(0, sigma)."""
    return MaxSquareSampler(sigma, ridge).draw(draws, seed)
