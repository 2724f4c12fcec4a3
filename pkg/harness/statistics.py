from typing import Sequence

import numpy as np
from scipy.stats import ks_2samp, linregress, norm

from errors import DomainError
from logging_setup import get_logger

# Get configured logger for this module
logger = get_logger(__name__)


def _finite(values: Sequence[float], label: str) -> np.ndarray:
    array = np.asarray(values, dtype=float)
    array = array[np.isfinite(array)]
    if array.size == 0:
        raise DomainError(f"{label} is empty")
    return array


def ks_distance(errors: Sequence[float], limit_draws: Sequence[float]) -> float:
    """
    Two-sample Kolmogorov-Smirnov statistic between normalized errors and limit draws.

    Raises:
        DomainError: If either sample is empty after dropping non-finite values.
    """
    sample = _finite(errors, "errors")
    reference = _finite(limit_draws, "limit_draws")
    return float(ks_2samp(sample, reference, method="asymp").statistic)


def coverage(
    estimates: Sequence[float],
    estimands: Sequence[float],
    variances: Sequence[float],
    delta_n: float,
    rate: float,
    level: float = 0.95,
) -> float:
    """
    Fraction of replications whose interval estimate -+ z sqrt(variance) Delta_n^rate covers the estimand.

    Parameters:
        estimates, estimands, variances: One entry per replication; non-positive variances are skipped.
        delta_n (float): Sampling step.
        rate (float): Convergence exponent, 1/2 for raw and 1/4 for pre-averaged estimators.
        level (float): Two-sided confidence level.

    Raises:
        DomainError: If the inputs differ in length, no replication has a usable variance
            or level is outside (0, 1).
    """
    if not 0.0 < level < 1.0:
        raise DomainError(f"level must lie in (0, 1), got {level}")
    estimates = np.asarray(estimates, dtype=float)
    estimands = np.asarray(estimands, dtype=float)
    variances = np.asarray(variances, dtype=float)
    if not estimates.shape == estimands.shape == variances.shape:
        raise DomainError(
            f"coverage inputs differ in length: {estimates.shape}, {estimands.shape}, {variances.shape}"
        )
    usable = np.isfinite(estimates) & np.isfinite(estimands) & (variances > 0.0)
    if not usable.any():
        raise DomainError("no replication with a positive variance")
    half_width = norm.ppf(0.5 + 0.5 * level) * np.sqrt(variances[usable]) * delta_n**rate
    covered = np.abs(estimates[usable] - estimands[usable]) <= half_width
    return float(np.mean(covered))


def rate_regression(delta_grid: Sequence[float], rmse: Sequence[float]) -> float:
    """
    Slope of log RMSE against log Delta_n.

    Raises:
        DomainError: If fewer than 3 points or any non-positive value is given.
    """
    steps = np.asarray(delta_grid, dtype=float)
    errors = np.asarray(rmse, dtype=float)
    if steps.size < 3 or steps.shape != errors.shape:
        raise DomainError(f"rate regression needs at least 3 matching points, got {steps.size}")
    if not ((steps > 0.0).all() and (errors > 0.0).all()):
        raise DomainError("rate regression needs positive steps and errors")
    slope = float(linregress(np.log(steps), np.log(errors)).slope)
    logger.debug(f"Rate slope {slope:.4f} over {steps.size} steps")
    return slope
