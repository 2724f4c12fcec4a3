import numpy as np

from errors import ConsistencyError
from logging_setup import get_logger
from models.path_record import PathRecord
from models.sampling import SamplingTimes

# Get configured logger for this module
logger = get_logger(__name__)


def sigma_at(path: PathRecord, times: np.ndarray) -> np.ndarray:
    """Spot volatility in force at each time: the Euler value of the last grid point <= t."""
    index = np.searchsorted(path.grid, np.asarray(times, dtype=float), side="right") - 1
    return path.sigma[np.clip(index, 0, path.grid.size - 1)]


def sample_process(path: PathRecord, times: SamplingTimes) -> np.ndarray:
    """
    Read the latent series X_{t_i} off the path grid.

    Observation times must be grid points: the lookup is exact, with no interpolation.

    Parameters:
        path (PathRecord): A path whose grid contains the observation times.
        times (SamplingTimes): Observation times; only t_0..t_N (<= horizon) are sampled.

    Returns:
        np.ndarray: X at t_0, ..., t_N.

    Raises:
        ConsistencyError: If an observation time is missing from the grid.
    """
    observed = times.observed
    index = np.searchsorted(path.grid, observed)
    inside = index < path.grid.size
    if not inside.all() or not np.array_equal(path.grid[index], observed):
        found = np.zeros(observed.size, dtype=bool)
        found[inside] = path.grid[index[inside]] == observed[inside]
        first = float(observed[~found][0])
        logger.error(f"Observation time {first!r} is not a grid point of the path")
        raise ConsistencyError(f"observation time {first!r} is missing from the path grid")
    return path.x[index]
