import math

import numpy as np

from errors import DegenerateDenominatorError, DomainError
from logging_setup import get_logger
from models.kernel import KernelConstants
from models.limit_law import GammaMatrix, JumpNoiseValues, LimitLawParams, NoisySkewVariance

# Get configured logger for this module
logger = get_logger(__name__)


def _jump_arrays(params: LimitLawParams) -> dict[str, np.ndarray]:
    noisy = params.noisy
    count = len(params.jumps)
    if noisy is not None and noisy.jump_values:
        values = noisy.jump_values
    else:
        values = (JumpNoiseValues(alpha_minus=0.0, alpha_plus=0.0, g_minus=1.0, g_plus=1.0),) * count
    return {
        "alpha_minus": np.array([value.alpha_minus for value in values], dtype=float),
        "alpha_plus": np.array([value.alpha_plus for value in values], dtype=float),
        "g_minus": np.array([value.g_minus for value in values], dtype=float),
        "g_plus": np.array([value.g_plus for value in values], dtype=float),
    }


def gamma_matrix(
    params: LimitLawParams,
    theta: float,
    constants: KernelConstants,
    squared_phi3_minus: bool = True,
) -> GammaMatrix:
    """
    Asymptotic F-conditional covariance of Delta_n^{-1/4} (PRV - [X,X]_T, PCV - sum (Delta X)^3).

    Continuous part:
        4 / psi2^2 * int [Phi22 theta sigma^4 G + 2 Phi12 / theta sigma^2 alpha + Phi11 / theta^3 alpha^2 / G]
    Jump parts, with left (-) and right (+) values at every jump J:
        11: 4 / psi2^2 sum J^2 [Phi22 theta (sigma+^2 G+ + sigma-^2 G-) + Phi12 / theta (alpha+ + alpha-)]
        12: 6 / (psi2 psi3) sum J^3 [theta (Phi23+ sigma+^2 G+ + Phi23- sigma-^2 G-)
                                     + (Phi23'+ alpha+ + Phi23'- alpha-) / theta]
        22: 9 / psi3^2 sum J^4 [theta (Phi3+ sigma+^2 G+ + Phi3- sigma-^2 G-)
                                + (Phi3'+ alpha+ + Phi3'- alpha-) / theta]

    Without noisy inputs G = 1 and alpha = 0 everywhere, so int sigma^4 G is the integrated quarticity.

    Parameters:
        params (LimitLawParams): Oracle inputs of the realization.
        theta (float): Pre-averaging tuning constant.
        constants (KernelConstants): psi and Phi constants of the weight function.
        squared_phi3_minus (bool): Use int phi_{g^2,g}^2 for Phi3-; False takes the unsquared integral.

    Returns:
        GammaMatrix: The four blocks.

    Raises:
        DomainError: If theta is not positive or G is not strictly positive on the path.
    """
    if not (math.isfinite(theta) and theta > 0.0):
        raise DomainError(f"theta must be positive, got {theta}")
    noisy = params.noisy
    if noisy is not None and not noisy.min_g > 0.0:
        raise DomainError(f"sampling intensity must be strictly positive, got min G = {noisy.min_g}")

    sigma4_g = noisy.sigma4_g if noisy is not None else params.iq
    sigma2_alpha = noisy.sigma2_alpha if noisy is not None else 0.0
    alpha2_over_g = noisy.alpha2_over_g if noisy is not None else 0.0
    psi2 = constants.psi2
    psi3 = constants.psi3
    gamma_c = (
        4.0
        / psi2**2
        * (
            constants.phi22 * theta * sigma4_g
            + 2.0 * constants.phi12 / theta * sigma2_alpha
            + constants.phi11 / theta**3 * alpha2_over_g
        )
    )

    sizes = params.jump_sizes
    side = _jump_arrays(params)
    variance_minus = params.sigma_minus**2 * side["g_minus"]
    variance_plus = params.sigma_plus**2 * side["g_plus"]
    phi3_minus = constants.phi3_minus if squared_phi3_minus else constants.phi3_minus_unsquared

    gbar11 = (
        4.0
        / psi2**2
        * float(
            np.sum(
                sizes**2
                * (
                    constants.phi22 * theta * (variance_plus + variance_minus)
                    + constants.phi12 / theta * (side["alpha_plus"] + side["alpha_minus"])
                )
            )
        )
    )
    gbar12 = (
        6.0
        / (psi2 * psi3)
        * float(
            np.sum(
                sizes**3
                * (
                    theta * (constants.phi23_plus * variance_plus + constants.phi23_minus * variance_minus)
                    + (constants.phi23p_plus * side["alpha_plus"] + constants.phi23p_minus * side["alpha_minus"])
                    / theta
                )
            )
        )
    )
    gbar22 = (
        9.0
        / psi3**2
        * float(
            np.sum(
                sizes**4
                * (
                    theta * (constants.phi3_plus * variance_plus + phi3_minus * variance_minus)
                    + (constants.phi3p_plus * side["alpha_plus"] + constants.phi3p_minus * side["alpha_minus"])
                    / theta
                )
            )
        )
    )
    result = GammaMatrix(gamma_c=gamma_c, gbar11=gbar11, gbar12=gbar12, gbar22=gbar22)
    logger.debug(
        f"Gamma over {sizes.size} jumps: c={gamma_c:.6g}, 11={gbar11:.6g}, 12={gbar12:.6g}, 22={gbar22:.6g}"
    )
    return result


def noisy_skew_variance(gamma: GammaMatrix, qv: float, cubic_jump_sum: float) -> NoisySkewVariance:
    """
    Delta-method variance d' Gamma d of the noisy skewness PCV / PRV^{3/2}.

    d1 = -3/2 C / qv^{5/2}, d2 = qv^{-3/2}. A continuous path (C = 0) makes the variance vanish;
    the result is then flagged as degenerate rather than used as a normalizer.

    Raises:
        DegenerateDenominatorError: If qv is not positive.
    """
    if not qv > 0.0:
        raise DegenerateDenominatorError("qv", qv, 0.0)
    d1 = -1.5 * cubic_jump_sum / qv**2.5
    d2 = qv**-1.5
    value = (
        d1**2 * (gamma.gamma_c + gamma.gbar11) + 2.0 * d1 * d2 * gamma.gbar12 + d2**2 * gamma.gbar22
    )
    degenerate = not value > 0.0 or cubic_jump_sum == 0.0
    if degenerate:
        logger.warning(f"Noisy skewness variance {value!r} is degenerate (cubic jump sum {cubic_jump_sum!r})")
    return NoisySkewVariance(value=value, d1=d1, d2=d2, degenerate=degenerate)
