import math
from typing import Optional, Sequence, Union

import numpy as np

from errors import ConfigurationError, DomainError, GenerationError
from logging_setup import get_logger
from models.path_record import PathRecord
from models.sampling import IntensitySpec, SamplingScheme, SamplingTimes
from simkit.rng import StreamLabel, stream
from simkit.sample_process import sigma_at

# Get configured logger for this module
logger = get_logger(__name__)

# Absorbs binary rounding of T / Delta_n in floor(T / Delta_n)
FLOOR_EPSILON = 1e-9


def intensity_values(
    intensity: IntensitySpec, t: np.ndarray, horizon: float, sigma: Optional[np.ndarray] = None
) -> np.ndarray:
    """Evaluate G(t, sigma_t) at each t."""
    t = np.asarray(t, dtype=float)
    if intensity.kind == "constant":
        return np.full(t.shape, intensity.level)
    if intensity.kind == "sinusoid":
        return intensity.level * (1.0 + intensity.amplitude * np.sin(2.0 * np.pi * t / horizon))
    if sigma is None:
        raise ConfigurationError("sigma-coupled intensity needs the simulated path")
    return intensity.level / (1.0 + intensity.coupling * np.asarray(sigma, dtype=float) ** 2)


def mesh_stats(times: Union[SamplingTimes, np.ndarray], t: float) -> tuple[float, int]:
    """
    Mesh r_n(t) = sup_i (t_i ^ t - t_{i-1} ^ t) with t_{-1} = 0, and N_t = max{i : t_i <= t}.

    The scheme continues beyond its last stored time, so the gap from the last time <= t
    up to t always counts.

    Raises:
        DomainError: If t is negative.
    """
    if t < 0.0:
        raise DomainError(f"t must be non-negative, got {t}")
    values = times.times if isinstance(times, SamplingTimes) else np.asarray(times, dtype=float)
    truncated = np.concatenate([[0.0], np.minimum(values, t), [t]])
    count = int(np.searchsorted(values, t, side="right")) - 1
    return float(np.max(np.diff(truncated))), count


def sampling_times_from(
    times: np.ndarray, horizon: float, delta_n: float, g_process: Optional[np.ndarray] = None
) -> SamplingTimes:
    """Wrap raw times into SamplingTimes, filling N_T and r_n(T). G defaults to 1."""
    times = np.asarray(times, dtype=float)
    mesh, count = mesh_stats(times, horizon)
    g_values = np.ones(times.shape) if g_process is None else g_process
    return SamplingTimes(
        times=times, horizon=horizon, delta_n=delta_n, g_process=g_values, n_count=count, mesh=mesh
    )


def equidistant_times(delta_n: float, horizon: float) -> np.ndarray:
    count = math.floor(horizon / delta_n + FLOOR_EPSILON)
    return np.minimum(np.arange(count + 1) * delta_n, horizon)


def _multipliers(scheme: SamplingScheme, rng: np.random.Generator, size: int) -> np.ndarray:
    if scheme.kind == "poisson" or scheme.multipliers == "exponential":
        return rng.exponential(1.0, size=size)
    if scheme.multipliers == "uniform":
        return rng.uniform(0.5, 1.5, size=size)
    return np.ones(size)


def _restricted_times(
    scheme: SamplingScheme,
    delta_n: float,
    horizon: float,
    rng: np.random.Generator,
    path: Optional[PathRecord],
) -> np.ndarray:
    intensity = scheme.intensity
    batch = int(1.2 * horizon / (delta_n * intensity.level * (1.0 - abs(intensity.amplitude)))) + 64

    if intensity.kind == "constant":
        spacings = []
        reached = 0.0
        while reached <= horizon:
            step = delta_n * intensity.level * _multipliers(scheme, rng, batch)
            if not (step > 0.0).all():
                raise GenerationError("spacing multipliers produced a non-positive spacing")
            spacings.append(step)
            reached += float(np.sum(step))
        times = np.concatenate([[0.0], np.cumsum(np.concatenate(spacings))])
        return times[times <= horizon]

    times = [0.0]
    current = 0.0
    while True:
        for multiplier in _multipliers(scheme, rng, batch):
            sigma = sigma_at(path, [current]) if path is not None else None
            g_value = float(intensity_values(intensity, np.array([current]), horizon, sigma)[0])
            following = current + delta_n * g_value * multiplier
            if not following > current:
                raise GenerationError(f"non-increasing observation time after t={current!r}")
            if following > horizon:
                return np.array(times)
            times.append(following)
            current = following


def generate_times(
    scheme: SamplingScheme,
    delta_n: float,
    horizon: float,
    seed: int,
    path: Optional[PathRecord] = None,
    key: Sequence[int] = (),
) -> SamplingTimes:
    """
    Generate observation times 0 = t_0 < t_1 < ... <= horizon.

    equidistant: t_i = min(i * Delta_n, T) for i <= floor(T / Delta_n).
    restricted:  t_p = t_{p-1} + Delta_n * G(t_{p-1}, sigma_{t_{p-1}}) * eps_p with i.i.d. eps of
                 mean 1; the first time beyond T stops the scheme and is not kept.
    poisson:     restricted with G = 1 and eps ~ Exp(1).

    Parameters:
        scheme (SamplingScheme): The observation scheme.
        delta_n (float): The sampling step Delta_n.
        horizon (float): The horizon T.
        seed (int): Master seed.
        path (PathRecord, optional): Needed when G depends on sigma.
        key (Sequence[int]): Extra stream indices.

    Returns:
        SamplingTimes: Times, G at every time, N_T and r_n(T).

    Raises:
        DomainError: If delta_n or horizon is not positive and finite.
        ConfigurationError: If G depends on sigma and no path is given.
        GenerationError: If the multipliers produce a non-increasing time.
    """
    if not (math.isfinite(delta_n) and delta_n > 0.0):
        raise DomainError(f"delta_n must be positive and finite, got {delta_n}")
    if not (math.isfinite(horizon) and horizon > 0.0):
        raise DomainError(f"horizon must be positive and finite, got {horizon}")
    if scheme.intensity.needs_path and path is None:
        raise ConfigurationError("sigma-coupled intensity needs the simulated path")

    if scheme.kind == "equidistant":
        times = equidistant_times(delta_n, horizon)
    else:
        rng = stream(seed, StreamLabel.TIMES, *key)
        times = _restricted_times(scheme, delta_n, horizon, rng, path)

    sigma = sigma_at(path, times) if path is not None else None
    g_process = intensity_values(scheme.intensity, times, horizon, sigma)
    result = sampling_times_from(times, horizon, delta_n, g_process)
    logger.debug(
        f"Generated {result.n_count} {scheme.kind} spacings (delta_n={delta_n}, mesh={result.mesh:.3e})"
    )
    return result
