"""Define the covariance adjusted statistic and its extreme value calibration.

The centered statistic converges to the type I extreme value law with CDF
exp(-exp(-x / 2) / sqrt(pi)), a Gumbel of location -log(pi) and scale 2.
"""

import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy import stats

from .covariance import inv_sqrt
from .mod import ModComponents, build_pipeline, report_fields
from .model import FloatArray, PooledSample, TestConfig, TestReport, decision_from

log = logging.getLogger(__name__)

LIMIT_LAW = stats.gumbel_r(loc=-math.log(math.pi), scale=2)


@dataclass(frozen=True, eq=False)
class AdjustedComponents:
    """Decorrelated standardized differences.

    Attributes:
        m: Inverse square root of the covariance applied to the differences.
        clipped: Whether the inverse square root floored eigenvalues.
    """

    m: FloatArray
    clipped: bool = False

    @property
    def statistic(self) -> float:
        """Return the maximum of the squared adjusted differences."""
        return float(np.max(self.m**2))


def camod_statistic(
    components: ModComponents, sigma_inv_sqrt: FloatArray, clipped: bool = False
) -> AdjustedComponents:
    """Decorrelate the differences with the inverse square root of the covariance."""
    if sigma_inv_sqrt.shape != (len(components.t), len(components.t)):
        raise ValueError(
            f"The inverse square root has shape {sigma_inv_sqrt.shape} "
            f"but there are {len(components.t)} differences"
        )
    return AdjustedComponents(m=sigma_inv_sqrt @ components.t, clipped=clipped)


def gumbel_centering(t_adj: float, n: int) -> float:
    """Center the adjusted statistic with 2 log n - log log n."""
    return t_adj - 2 * math.log(n) + math.log(math.log(n))


def gumbel_pvalue(centered: float) -> float:
    """Return the upper tail probability of the limit law."""
    return float(LIMIT_LAW.sf(centered))


def gumbel_critical(alpha: float) -> float:
    """Return the critical value q_alpha of the centered statistic.

    Examples:
    >>> round(gumbel_critical(0.05), 4)
    4.7957
    """
    if not 0 < alpha < 1:
        raise ValueError(f"The significance level must be in (0, 1), got {alpha}")
    return float(LIMIT_LAW.isf(alpha))


def camod_test(sample: PooledSample, config: TestConfig) -> TestReport:
    """Run the CA-MOD test calibrated with the extreme value limit."""
    pipeline = build_pipeline(sample, config)
    root, clipped = inv_sqrt(pipeline.sigma, config.ridge)
    adjusted = camod_statistic(pipeline.components, root, clipped)
    centered = gumbel_centering(adjusted.statistic, sample.n)
    critical_value = gumbel_critical(config.alpha)

    fields = report_fields(pipeline, sample, config)
    if clipped:
        log.warning(
            "The covariance is not positive definite, the extreme value "
            "calibration may be inaccurate"
        )
        fields["warnings"].append("covariance not positive definite")

    report = TestReport(
        method="camod",
        statistic=adjusted.statistic,
        centered_statistic=centered,
        p_value=gumbel_pvalue(centered),
        critical_value=critical_value,
        decision=decision_from(centered >= critical_value),
        pd_clipped=clipped,
        **fields,
    )
    log.info(
        f"CA-MOD statistic {adjusted.statistic:.4f}, centered {centered:.4f}, "
        f"p-value {report.p_value:.4f}: {report.decision}"
    )
    return report
