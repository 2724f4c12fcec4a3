from typing import Sequence

from logging_setup import get_logger
from models.model_spec import ModelSpec
from models.path_record import PathRecord
from models.sampling import SamplingScheme, SamplingTimes
from simkit.generate_times import generate_times
from simkit.simulate_path import refine_path, simulate_path

# Get configured logger for this module
logger = get_logger(__name__)


def simulate_observed(
    model: ModelSpec,
    sampling: SamplingScheme,
    delta_n: float,
    euler_step: float,
    seed: int,
    key: Sequence[int] = (),
) -> tuple[PathRecord, SamplingTimes]:
    """
    Simulate a path together with observation times that are grid points of it.

    Times that do not depend on sigma are generated first and put on the Euler grid. When G
    depends on sigma the path comes first, the times are generated from it and the path is
    refined by Brownian-bridge interpolation at the new times.

    Returns:
        tuple[PathRecord, SamplingTimes]: The path and the observation times.
    """
    horizon = model.horizon
    if sampling.intensity.needs_path:
        path = simulate_path(model, euler_step, seed, key=key)
        times = generate_times(sampling, delta_n, horizon, seed, path=path, key=key)
        path = refine_path(path, times, seed, key=key)
    else:
        times = generate_times(sampling, delta_n, horizon, seed, key=key)
        path = simulate_path(model, euler_step, seed, observation_times=times.observed, key=key)
    logger.debug(f"Observed {times.n_count + 1} of {path.grid.size} grid points")
    return path, times
