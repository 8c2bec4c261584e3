"""Define the maximum of differences statistic and its Monte Carlo calibration."""

import logging
import math
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
from joblib import Parallel, delayed

from .covariance import (
    DegenerateVarianceError,
    GroupStructuredCovariance,
    MaxSquareSampler,
    estimate_sigma,
    inv_sqrt,
    materialize,
)
from .distance import (
    ConnectivityGraph,
    connectivity,
    lower_quantile,
    pairwise_distances,
    select_tau,
)
from .estimators import ConnectionProbabilities, connection_probabilities
from .model import (
    DegenerateStatisticError,
    FloatArray,
    NumericalError,
    PooledSample,
    TestConfig,
    TestReport,
    decision_from,
)

log = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class ModComponents:
    """Standardized within minus between differences of every observation.

    Attributes:
        t: Standardized difference T_i of each observation.
        variance_terms: Variance of the difference of each observation.
    """

    t: FloatArray
    variance_terms: FloatArray

    @property
    def statistic(self) -> float:
        """Return the maximum of the squared differences."""
        return float(np.max(self.t**2))


@dataclass(frozen=True, eq=False)
class PowerDiagnostics:
    """Plug-in estimates of the discrepancy that drives the power of the tests.

    Attributes:
        nu_hat: Squared standardized discrepancy of each observation.
        omega_hat: Decorrelated square root of nu_hat.
        p_kl_hat: Connection frequency between each pair of groups.
        clipped: Whether the decorrelation had to floor eigenvalues.
    """

    nu_hat: FloatArray
    omega_hat: FloatArray
    p_kl_hat: FloatArray
    clipped: bool = False


@dataclass(frozen=True, eq=False)
class StatisticPipeline:
    """Intermediate results shared by the MOD and CA-MOD tests."""

    tau: float
    tau_quantile: Optional[float]
    graph: ConnectivityGraph
    probabilities: ConnectionProbabilities
    components: ModComponents
    covariance: GroupStructuredCovariance
    sigma: FloatArray


@dataclass(frozen=True)
class MonteCarloCalibration:
    """Outcome of the two step replication of the null distribution.

    Attributes:
        p_value: Pooled empirical p-value with the +1 correction.
        p_mod: Fraction of replicates whose critical value is below the statistic.
        critical_value: Median of the replicate critical values.
        clipped: Whether the sampler had to floor eigenvalues.
    """

    p_value: float
    p_mod: float
    critical_value: float
    clipped: bool


def mod_components(
    probabilities: ConnectionProbabilities, sample: PooledSample
) -> ModComponents:
    """Standardize the difference of the between and within proportions.

    Raises:
        DegenerateVarianceError: naming the first observation whose variance term
            is not positive.
    """
    own_sizes = sample.own_group_sizes()
    scale = 1 / (sample.n - own_sizes) + 1 / (own_sizes - 1)
    spread = probabilities.p0_i * (1 - probabilities.p0_i) - probabilities.p12_i
    variance_terms = scale * spread
    degenerate = np.flatnonzero(variance_terms <= 0)
    if degenerate.size > 0:
        first = int(degenerate[0])
        raise DegenerateVarianceError(
            f"The variance of the observation {first} is not positive, it's connected "
            "to all or none of the other observations",
            observation=first,
        )
    t = (probabilities.p_bet - probabilities.p_in) / np.sqrt(variance_terms)
    return ModComponents(t=t, variance_terms=variance_terms)


def build_pipeline(sample: PooledSample, config: TestConfig) -> StatisticPipeline:
    """Run the steps from the distances to the covariance of the differences."""
    dmat = pairwise_distances(sample)
    if config.tau is not None:
        tau, tau_quantile = config.tau, None
    else:
        tau = select_tau(dmat, config.tau_quantile)
        tau_quantile = config.tau_quantile
    log.info(f"Connecting the observations closer than tau = {tau:.6g}")

    graph = connectivity(dmat, tau)
    probabilities = connection_probabilities(graph, sample)
    components = mod_components(probabilities, sample)
    covariance = estimate_sigma(
        probabilities.p0, probabilities.p12, sample.group_sizes, sample.groups
    )
    return StatisticPipeline(
        tau=tau,
        tau_quantile=tau_quantile,
        graph=graph,
        probabilities=probabilities,
        components=components,
        covariance=covariance,
        sigma=materialize(covariance),
    )


def replicate_max_sq(sigma: FloatArray, config: TestConfig) -> Tuple[FloatArray, bool]:
    """Draw the (B, N) matrix of gaussian max squares.

    Every replicate has its own child seed, so the result doesn't depend on the
    number of threads.
    """
    sampler = MaxSquareSampler(sigma, config.ridge)
    seeds = np.random.SeedSequence(config.seed).spawn(config.mc_outer)
    replicates = Parallel(n_jobs=config.threads, prefer="threads")(
        delayed(sampler.draw)(config.mc_inner, seed) for seed in seeds
    )
    return np.stack(replicates), sampler.clipped


def calibrate(
    statistic: float, sigma: FloatArray, config: TestConfig
) -> MonteCarloCalibration:
    """Calibrate the statistic against gaussian max squares of covariance sigma."""
    draws, clipped = replicate_max_sq(sigma, config)
    critical_values = np.array(
        [lower_quantile(replicate, 1 - config.alpha) for replicate in draws]
    )
    exceedances = int(np.sum(draws >= statistic))
    return MonteCarloCalibration(
        p_value=(1 + exceedances) / (draws.size + 1),
        p_mod=float(np.mean(statistic > critical_values)),
        critical_value=float(np.median(critical_values)),
        clipped=clipped,
    )


def connection_frequencies(
    graph: ConnectivityGraph, sample: PooledSample
) -> Tuple[FloatArray, FloatArray]:
    """Estimate the connection frequencies by pairs and triples of groups.

    Returns:
        The (K, K) frequency of connected pairs between groups k and l, and the
        (K, K, K) covariance [g, k, l] of the connections of an observation of
        group g with observations of groups k and l, averaged over group g.
    """
    membership = sample.membership()
    sizes = sample.group_sizes.astype(np.float64)
    counts = graph.adjacency @ membership
    pairs = np.outer(sizes, sizes) - np.diag(sizes)
    p_kl = (membership.T @ counts) / pairs

    own_p = p_kl[sample.groups - 1]
    others = sizes[np.newaxis, :] - membership
    deviations = counts - others * own_p
    squares = counts * (1 - own_p) ** 2 + (others - counts) * own_p**2

    cross = deviations[:, :, np.newaxis] * deviations[:, np.newaxis, :]
    cross_pairs = others[:, :, np.newaxis] * others[:, np.newaxis, :]
    diagonal = np.arange(sample.k)
    cross[:, diagonal, diagonal] -= squares
    cross_pairs[:, diagonal, diagonal] -= others
    with np.errstate(divide="ignore", invalid="ignore"):
        per_observation = np.where(cross_pairs > 0, cross / cross_pairs, 0.0)

    flat = membership.T @ per_observation.reshape(sample.n, -1)
    p_gkl = (flat / sizes[:, np.newaxis]).reshape(sample.k, sample.k, sample.k)
    return p_kl, p_gkl


def power_diagnostics(
    graph: ConnectivityGraph, sample: PooledSample, ridge: float = 1e-10
) -> PowerDiagnostics:
    """Estimate the discrepancy between the within and between probabilities.

    Raises:
        DegenerateVarianceError: if the denominator of a group is not positive.
    """
    p_kl, p_gkl = connection_frequencies(graph, sample)
    gamma = sample.group_sizes / sample.n

    nu_by_group = np.empty(sample.k)
    delta_by_group = np.empty(sample.k)
    for group in range(sample.k):
        own = p_kl[group]
        others = np.delete(np.arange(sample.k), group)
        shift = gamma[others] @ own[others] / (1 - gamma[group]) - own[group]
        mean = float(gamma @ own)
        centered = own - mean
        delta = float(gamma @ p_gkl[group] @ gamma + (gamma @ centered) ** 2)
        denominator = mean * (1 - mean) - delta
        if denominator <= 0:
            raise DegenerateVarianceError(
                f"The discrepancy of group {sample.labels[group]} has a "
                f"non positive variance {denominator:.3g}"
            )
        nu_by_group[group] = shift**2 / denominator
        delta_by_group[group] = delta

    nu_hat = nu_by_group[sample.groups - 1]
    p0_alternative = float(gamma @ p_kl @ gamma)
    p12_alternative = float(gamma @ delta_by_group)
    sigma_alternative = estimate_sigma(
        p0_alternative, p12_alternative, sample.group_sizes, sample.groups
    )
    root, clipped = inv_sqrt(materialize(sigma_alternative), ridge)
    omega_hat = root @ np.sqrt(nu_hat)

    threshold = 4 * math.log(sample.n)
    log.info(
        f"Power diagnostics: n max nu = {sample.n * nu_hat.max():.4g}, "
        f"n max omega^2 = {sample.n * np.max(omega_hat**2):.4g}, "
        f"4 log n = {threshold:.4g}"
    )
    return PowerDiagnostics(
        nu_hat=nu_hat, omega_hat=omega_hat, p_kl_hat=p_kl, clipped=clipped
    )


def report_fields(
    pipeline: StatisticPipeline, sample: PooledSample, config: TestConfig
) -> Dict[str, Any]:
    """Gather the report fields shared by both tests."""
    fields: Dict[str, Any] = {
        "alpha": config.alpha,
        "tau": pipeline.tau,
        "tau_quantile": pipeline.tau_quantile,
        "p0_hat": pipeline.probabilities.p0,
        "p12_hat": pipeline.probabilities.p12,
        "n": sample.n,
        "p": sample.p,
        "k": sample.k,
        "group_sizes": sample.group_sizes.tolist(),
        "seed": config.seed,
    }
    warnings: List[str] = []
    if config.diagnostics:
        try:
            diagnostics = power_diagnostics(pipeline.graph, sample, config.ridge)
        except (DegenerateStatisticError, NumericalError) as error:
            log.warning(f"The power diagnostics could not be computed: {error}")
            warnings.append(f"power diagnostics unavailable: {error}")
        else:
            fields["nu_hat"] = diagnostics.nu_hat.tolist()
            fields["omega_hat"] = diagnostics.omega_hat.tolist()
    fields["warnings"] = warnings
    return fields


def mod_test(sample: PooledSample, config: TestConfig) -> TestReport:
    """Run the MOD test calibrated with the Monte Carlo replication method.

    The decision is taken on the pooled p-value, the fraction of replicate
    critical values exceeded by the statistic is reported as p_mod_replicated.
    """
    pipeline = build_pipeline(sample, config)
    statistic = pipeline.components.statistic
    calibration = calibrate(statistic, pipeline.sigma, config)
    fields = report_fields(pipeline, sample, config)
    if calibration.clipped:
        log.warning("The covariance is not positive definite, eigenvalues were floored")
        fields["warnings"].append("covariance eigenvalues floored in the sampler")

    report = TestReport(
        method="mod",
        statistic=statistic,
        p_value=calibration.p_value,
        p_mod_replicated=calibration.p_mod,
        critical_value=calibration.critical_value,
        decision=decision_from(calibration.p_value <= config.alpha),
        pd_clipped=calibration.clipped,
        **fields,
    )
    log.info(
        f"MOD statistic {statistic:.4f}, p-value {report.p_value:.4f}: "
        f"{report.decision}"
    )
    return report
