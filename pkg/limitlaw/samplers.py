"""
Samplers of the mixed-normal limits of raw power variations and realized skewness.

All components of one draw share the same auxiliary variables: U0 for the continuous part
and, per jump q, kappa_q ~ U(0, 1) and standard normals U_q, U'_q building
R_q = sqrt(kappa_q) sigma_{T_q-} U_q + sqrt(1 - kappa_q) sigma_{T_q} U'_q.
"""

import math
from typing import Callable, Sequence, Union

import numpy as np

from errors import DegenerateDenominatorError, DomainError
from logging_setup import get_logger
from models.limit_law import AuxiliaryDraws, LimitDraws, LimitLawParams
from simkit.rng import StreamLabel, stream

# Get configured logger for this module
logger = get_logger(__name__)

# E|Z|^3 for a standard normal Z
ABS_CUBE_MOMENT = 2.0 * math.sqrt(2.0) / math.sqrt(math.pi)


def _sign(x: np.ndarray) -> np.ndarray:
    return np.where(x >= 0.0, 1.0, -1.0)


DERIVATIVES: dict[str, Callable[[np.ndarray], np.ndarray]] = {
    "square": lambda x: 2.0 * x,
    "cube": lambda x: 3.0 * x**2,
    "abs_cube": lambda x: 3.0 * _sign(x) * x**2,
}

Derivative = Union[str, Callable[[np.ndarray], np.ndarray]]


def _check_draws(n_draws: int) -> None:
    if n_draws < 1:
        raise DomainError(f"n_draws must be at least 1, got {n_draws}")


def draw_auxiliary(params: LimitLawParams, n_draws: int, seed: int, key: Sequence[int] = ()) -> AuxiliaryDraws:
    """Draw U0, kappa, U and U' for n_draws draws of a limit with the given jump ledger."""
    _check_draws(n_draws)
    rng = stream(seed, StreamLabel.LIMIT, *key)
    jumps = len(params.jumps)
    return AuxiliaryDraws(
        u0=rng.standard_normal(n_draws),
        kappa=rng.uniform(size=(n_draws, jumps)),
        u=rng.standard_normal((n_draws, jumps)),
        u_prime=rng.standard_normal((n_draws, jumps)),
    )


def r_variables(params: LimitLawParams, auxiliary: AuxiliaryDraws) -> np.ndarray:
    """R_q for every draw and jump, shape (n_draws, n_jumps)."""
    return (
        np.sqrt(auxiliary.kappa) * params.sigma_minus * auxiliary.u
        + np.sqrt(1.0 - auxiliary.kappa) * params.sigma_plus * auxiliary.u_prime
    )


def jump_component(params: LimitLawParams, g_prime: Derivative, auxiliary: AuxiliaryDraws) -> np.ndarray:
    """sum_q g'(Delta X_{T_q}) R_q for every stored draw."""
    derivative = DERIVATIVES[g_prime] if isinstance(g_prime, str) else g_prime
    weights = np.asarray(derivative(params.jump_sizes), dtype=float)
    return r_variables(params, auxiliary) @ weights


def thm2_limit_sample(
    params: LimitLawParams, g_prime: Derivative, n_draws: int, seed: int, key: Sequence[int] = ()
) -> LimitDraws:
    """
    Draw the joint limit of the normalized errors of RV and of a power variation V(X, g).

    First component sqrt(2 IQ) U0 + Z(X, 2), second component sum g'(Delta X_q) R_q,
    with the same R_q in both.

    Parameters:
        params (LimitLawParams): Oracle inputs of the realization.
        g_prime: Derivative g' ("square", "cube", "abs_cube" or a vectorized callable).
        n_draws (int): Number of independent draws.
        seed (int): Master seed.
        key (Sequence[int]): Extra stream indices.

    Returns:
        LimitDraws: Both components and the auxiliary variables that produced them.
    """
    auxiliary = draw_auxiliary(params, n_draws, seed, key)
    continuous = math.sqrt(2.0 * params.iq) * auxiliary.u0 + jump_component(params, "square", auxiliary)
    jump = jump_component(params, g_prime, auxiliary)
    logger.debug(f"Drew {n_draws} joint limit draws over {len(params.jumps)} jumps")
    return LimitDraws(continuous=continuous, jump=jump, auxiliary=auxiliary)


def abs_cubic_limit_sample(params: LimitLawParams, n_draws: int, seed: int, key: Sequence[int] = ()) -> np.ndarray:
    """Draws of 2 sqrt(2) / sqrt(pi) int |sigma|^3 ds + 3 sum sign(Delta X_q) (Delta X_q)^2 R_q."""
    auxiliary = draw_auxiliary(params, n_draws, seed, key)
    return ABS_CUBE_MOMENT * params.abs_cubic_sigma + jump_component(params, "abs_cube", auxiliary)


def skew_limit_sample(params: LimitLawParams, n_draws: int, seed: int, key: Sequence[int] = ()) -> np.ndarray:
    """
    Draws of the realized-skewness limit

        (qv^{3/2} Z(X,3) - 3/2 sqrt(qv) C (sqrt(2 IQ) U0 + Z(X,2))) / qv^3

    with C the cubic jump sum and the same R_q inside Z(X,2) and Z(X,3).

    Raises:
        DegenerateDenominatorError: If qv is zero.
    """
    qv = params.qv
    if not qv > 0.0:
        raise DegenerateDenominatorError("qv", qv, 0.0)
    auxiliary = draw_auxiliary(params, n_draws, seed, key)
    z2 = jump_component(params, "square", auxiliary)
    z3 = jump_component(params, "cube", auxiliary)
    continuous = math.sqrt(2.0 * params.iq) * auxiliary.u0 + z2
    return (qv**1.5 * z3 - 1.5 * math.sqrt(qv) * params.cubic_jump_sum * continuous) / qv**3
