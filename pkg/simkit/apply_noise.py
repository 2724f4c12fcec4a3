from typing import Optional, Sequence

import numpy as np

from errors import ConfigurationError, DomainError
from logging_setup import get_logger
from models.noise import NoiseModel
from models.sampling import SamplingTimes
from simkit.rng import StreamLabel, stream

# Get configured logger for this module
logger = get_logger(__name__)


def noise_variance(
    noise: NoiseModel, t: np.ndarray, horizon: float, sigma: Optional[np.ndarray] = None
) -> np.ndarray:
    """
    Conditional noise variance alpha_t at each t.

    Raises:
        ConfigurationError: If alpha is negative or not finite anywhere, or sigma is needed but missing.
    """
    t = np.asarray(t, dtype=float)
    if noise.variance == "constant":
        alpha = np.full(t.shape, noise.level)
    elif noise.variance == "sinusoid":
        alpha = noise.level * (1.0 + noise.amplitude * np.sin(2.0 * np.pi * t / horizon))
    else:
        if sigma is None:
            raise ConfigurationError("sigma-coupled noise variance needs the simulated path")
        alpha = noise.level * np.asarray(sigma, dtype=float) ** 2
    if not np.isfinite(alpha).all() or (alpha < 0.0).any():
        raise ConfigurationError(
            f"noise variance must be finite and non-negative (level={noise.level}, amplitude={noise.amplitude})"
        )
    return alpha


def apply_noise(
    latent: np.ndarray,
    times: SamplingTimes,
    noise: NoiseModel,
    seed: int,
    sigma: Optional[np.ndarray] = None,
    key: Sequence[int] = (),
) -> np.ndarray:
    """
    Contaminate a latent series: Y_i = X_i + eps_i.

    Given the path the eps_i are independent with mean zero and variance alpha_{t_i}:
    Gaussian N(0, alpha) or the two-point law +-sqrt(alpha) with probability 1/2 each.

    Parameters:
        latent (np.ndarray): X at t_0..t_N.
        times (SamplingTimes): The observation times.
        noise (NoiseModel): The noise law.
        seed (int): Master seed.
        sigma (np.ndarray, optional): sigma at the observation times, for sigma-coupled variance.
        key (Sequence[int]): Extra stream indices.

    Returns:
        np.ndarray: The observed series Y.

    Raises:
        DomainError: If latent and times differ in length.
        ConfigurationError: If the variance model yields a negative variance.
    """
    latent = np.asarray(latent, dtype=float)
    observed = times.observed
    if latent.shape != observed.shape:
        raise DomainError(f"{latent.size} latent values for {observed.size} observation times")

    alpha = noise_variance(noise, observed, times.horizon, sigma)
    if not alpha.any():
        return latent.copy()

    rng = stream(seed, StreamLabel.NOISE, *key)
    if noise.family == "gaussian":
        shocks = rng.standard_normal(latent.size)
    else:
        shocks = np.where(rng.uniform(size=latent.size) < 0.5, 1.0, -1.0)
    logger.debug(f"Applied {noise.family} noise to {latent.size} observations")
    return latent + np.sqrt(alpha) * shocks
