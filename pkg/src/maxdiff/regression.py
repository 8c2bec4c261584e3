"""Compare the error distributions of K multivariate regressions.

Each group is fitted by ordinary least squares and the tests run on the pooled
residuals.
"""

import logging
import math
from typing import Callable, Dict, Literal

import numpy as np
import scipy.linalg
from numpy.typing import ArrayLike

from .camod import camod_test
from .mod import mod_test
from .model import (
    FloatArray,
    InputError,
    PooledSample,
    RegressionSample,
    TestConfig,
    TestReport,
    validate_sample,
)

log = logging.getLogger(__name__)

Mode = Literal["mod", "camod"]
TESTS: Dict[str, Callable[[PooledSample, TestConfig], TestReport]] = {
    "mod": mod_test,
    "camod": camod_test,
}
SINGULAR_TOLERANCE = 1e-10


class SingularDesignError(InputError):
    """Raised when the covariates of a group are collinear."""


def ols_residuals(responses: ArrayLike, covariates: ArrayLike) -> FloatArray:
    """Remove from every response row its projection on the covariate columns.

    Args:
        responses: Response matrix of shape (p, n_k).
        covariates: Covariate matrix of shape (n_k, d).

    Returns:
        Residual matrix E of shape (p, n_k) with E W = 0.

    Raises:
        SingularDesignError: if the smallest singular value of the covariates is
            below 1e-10 times the largest one.
    """
    x_matrix = np.asarray(responses, dtype=np.float64)
    w_matrix = np.asarray(covariates, dtype=np.float64)
    singular_values = np.linalg.svd(w_matrix, compute_uv=False)
    if singular_values.max() == 0 or (
        singular_values.min() < SINGULAR_TOLERANCE * singular_values.max()
    ):
        raise SingularDesignError(
            "The covariates are collinear, their singular values range from "
            f"{singular_values.min():.3g} to {singular_values.max():.3g}"
        )
    q_matrix, _ = scipy.linalg.qr(w_matrix, mode="economic")
    return x_matrix - (x_matrix @ q_matrix) @ q_matrix.T


def pooled_residuals(sample: RegressionSample) -> PooledSample:
    """Fit every group and pool the residuals keeping the group structure."""
    residuals = [
        ols_residuals(responses, covariates)
        for responses, covariates in zip(sample.responses, sample.covariates)
    ]
    labels = [
        label
        for label, size in zip(sample.labels, sample.group_sizes)
        for _ in range(size)
    ]
    return validate_sample(np.hstack(residuals), labels)


def regression_test(
    sample: RegressionSample, config: TestConfig, mode: Mode = "camod"
) -> TestReport:
    """Run the MOD or CA-MOD test on the least squares residuals of each group."""
    residuals = pooled_residuals(sample)
    report = TESTS[mode](residuals, config)

    warnings = list(report.warnings)
    ratio = sample.p * math.log(sample.n) / sample.n
    if ratio > 1:
        log.warning(
            f"p log(n) / n = {ratio:.3g} is above 1, the residual test "
            "may not hold its level"
        )
        warnings.append(f"p log(n) / n = {ratio:.3g} > 1")
    return report.copy(update={"regression": True, "d": sample.d, "warnings": warnings})
