from typing import Optional

import numpy as np
from scipy.integrate import trapezoid

from errors import DegenerateDenominatorError
from logging_setup import get_logger
from models.limit_law import JumpNoiseValues, LimitLawParams, NoisyLimitInputs
from models.noise import NoiseModel
from models.path_record import PathRecord
from models.sampling import SamplingScheme
from simkit.apply_noise import noise_variance
from simkit.generate_times import intensity_values

# Get configured logger for this module
logger = get_logger(__name__)


def skew_estimand(qv: float, cubic_jump_sum: float) -> float:
    """sum (Delta X)^3 / [X,X]_T^{3/2}."""
    if not qv > 0.0:
        raise DegenerateDenominatorError("qv", qv, 0.0)
    return cubic_jump_sum / qv**1.5


def oracle_targets(path: PathRecord) -> tuple[float, float, float]:
    """
    Quadratic variation, cubic jump sum and skewness estimand of a simulated path.

    Raises:
        DegenerateDenominatorError: If [X,X]_T is zero, which leaves the ratio undefined.
    """
    qv = path.oracles.quadratic_variation
    cubic = path.oracles.cubic_jump_sum
    return qv, cubic, skew_estimand(qv, cubic)


def _jump_sums(params: LimitLawParams) -> tuple[np.ndarray, np.ndarray]:
    return params.jump_sizes, 0.5 * (params.sigma_minus**2 + params.sigma_plus**2)


def rv_limit_variance(params: LimitLawParams) -> float:
    """F-conditional variance of sqrt(2 IQ) U0 + Z(X, 2): 2 IQ + sum 4 J^2 E[R^2]."""
    sizes, r_variance = _jump_sums(params)
    return 2.0 * params.iq + float(np.sum(4.0 * sizes**2 * r_variance))


def cubic_limit_variance(params: LimitLawParams) -> float:
    """F-conditional variance of Z(X, 3) = sum 3 J^2 R: sum 9 J^4 E[R^2]."""
    sizes, r_variance = _jump_sums(params)
    return float(np.sum(9.0 * sizes**4 * r_variance))


def skew_limit_variance(params: LimitLawParams) -> float:
    """
    F-conditional variance of the realized-skewness limit.

    The limit is A Z(X,3) + B (sqrt(2 IQ) U0 + Z(X,2)) with A = qv^{-3/2} and
    B = -3/2 C qv^{-5/2}, so its variance is 2 IQ B^2 + sum (3 A J^2 + 2 B J)^2 E[R^2].
    """
    qv = params.qv
    if not qv > 0.0:
        raise DegenerateDenominatorError("qv", qv, 0.0)
    sizes, r_variance = _jump_sums(params)
    a = qv**-1.5
    b = -1.5 * params.cubic_jump_sum * qv**-2.5
    return 2.0 * params.iq * b**2 + float(np.sum((3.0 * a * sizes**2 + 2.0 * b * sizes) ** 2 * r_variance))


def limit_law_params(
    path: PathRecord,
    sampling: Optional[SamplingScheme] = None,
    noise: Optional[NoiseModel] = None,
) -> LimitLawParams:
    """
    Collect the limit-law inputs of one realization.

    With a sampling scheme or a noise model the noisy inputs are filled from the path grid:
    int sigma^4 G, int sigma^2 alpha and int alpha^2 / G by trapezoid, and alpha and G on
    both sides of every jump. A missing scheme means G = 1; missing noise means alpha = 0.

    Parameters:
        path (PathRecord): The simulated path.
        sampling (SamplingScheme, optional): Scheme whose intensity G was used.
        noise (NoiseModel, optional): Noise law of the observations.

    Returns:
        LimitLawParams: Oracle inputs of every limit sampler and of the Gamma matrix.
    """
    oracles = path.oracles
    noisy = None
    if sampling is not None or noise is not None:
        grid = path.grid
        horizon = path.horizon
        sigma = path.sigma
        g_values = (
            intensity_values(sampling.intensity, grid, horizon, sigma)
            if sampling is not None
            else np.ones(grid.size)
        )
        alpha = noise_variance(noise, grid, horizon, sigma) if noise is not None else np.zeros(grid.size)
        index = np.searchsorted(grid, [jump.time for jump in path.jumps]).astype(int)
        noisy = NoisyLimitInputs(
            sigma4_g=float(trapezoid(sigma**4 * g_values, grid)),
            sigma2_alpha=float(trapezoid(sigma**2 * alpha, grid)),
            alpha2_over_g=float(trapezoid(alpha**2 / g_values, grid)),
            jump_values=tuple(
                JumpNoiseValues(
                    alpha_minus=float(alpha[position - 1]),
                    alpha_plus=float(alpha[position]),
                    g_minus=float(g_values[position - 1]),
                    g_plus=float(g_values[position]),
                )
                for position in index
            ),
            min_g=float(np.min(g_values)),
        )
    return LimitLawParams(
        iq=oracles.integrated_quarticity,
        qv=oracles.quadratic_variation,
        abs_cubic_sigma=oracles.abs_cubic_sigma_integral,
        cubic_jump_sum=oracles.cubic_jump_sum,
        jumps=path.jumps,
        noisy=noisy,
    )
