import math
from typing import Optional, Sequence

import numpy as np
from scipy.integrate import trapezoid

from errors import ConfigurationError, ConsistencyError, DomainError
from logging_setup import get_logger
from models.model_spec import JumpModel, ModelSpec
from models.path_record import JumpRecord, PathOracles, PathRecord
from models.sampling import SamplingTimes
from simkit.rng import StreamLabel, stream

# Get configured logger for this module
logger = get_logger(__name__)

# Uniform Euler points closer than this fraction of a step to a required point are dropped
_MERGE_TOLERANCE = 1e-9


def draw_jumps(jumps: JumpModel, horizon: float, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    """
    Draw compound Poisson jump times and sizes and merge in the deterministic jumps.

    The count is Poisson(intensity * horizon) and the times are its sorted uniform order
    statistics. Jumps sharing a time are added together.

    Returns:
        tuple[np.ndarray, np.ndarray]: Sorted distinct jump times and their sizes.
    """
    count = int(rng.poisson(jumps.intensity * horizon)) if jumps.intensity > 0.0 else 0
    times = np.sort(rng.uniform(0.0, horizon, size=count))

    if jumps.size_distribution == "point_mass":
        sizes = np.full(count, jumps.size)
    elif jumps.size_distribution == "two_sided_exponential":
        magnitudes = rng.exponential(jumps.scale, size=count) if jumps.scale > 0.0 else np.zeros(count)
        signs = np.where(rng.uniform(size=count) < jumps.up_probability, 1.0, -1.0)
        sizes = signs * magnitudes
    else:
        sizes = rng.normal(jumps.size, jumps.scale, size=count)

    if jumps.fixed_jumps:
        times = np.concatenate([times, [jump.time for jump in jumps.fixed_jumps]])
        sizes = np.concatenate([sizes, [jump.size for jump in jumps.fixed_jumps]])

    keep = times > 0.0
    distinct, inverse = np.unique(times[keep], return_inverse=True)
    merged = np.bincount(inverse, weights=sizes[keep], minlength=distinct.size)
    return distinct, merged


def build_grid(horizon: float, euler_step: float, required: np.ndarray) -> np.ndarray:
    """
    Union of a uniform grid with step <= euler_step and the required points.

    Required points (0, horizon, observation and jump times) are kept exactly; uniform points
    within a tiny tolerance of one of them are dropped so no spacing degenerates.
    """
    steps = max(1, math.ceil(horizon / euler_step - 1e-9))
    uniform = np.linspace(0.0, horizon, steps + 1)
    required = np.unique(np.concatenate([[0.0, horizon], required]))

    position = np.clip(np.searchsorted(required, uniform), 1, required.size - 1)
    distance = np.minimum(
        np.abs(uniform - required[position - 1]), np.abs(required[position] - uniform)
    )
    kept = uniform[distance > _MERGE_TOLERANCE * euler_step]
    return np.union1d(required, kept)


def simulate_volatility(
    model: ModelSpec, steps: np.ndarray, brownian: np.ndarray, rng: np.random.Generator
) -> np.ndarray:
    """
    Spot volatility on every grid point.

    Constant volatility returns a constant array. CIR variance uses a full-truncation Euler
    scheme whose driving noise has correlation `leverage` with the price Brownian increments.
    """
    volatility = model.volatility
    if volatility.kind == "constant":
        return np.full(steps.size + 1, volatility.sigma)
    if not volatility.satisfies_feller:
        logger.warning(
            f"Feller condition fails (2 kappa theta = {2.0 * volatility.mean_reversion * volatility.long_run_variance:.4g} "
            f"< xi^2 = {volatility.vol_of_vol**2:.4g}); full truncation keeps the variance non-negative"
        )

    orthogonal = rng.standard_normal(steps.size)
    rho = volatility.leverage
    shocks = rho * brownian + math.sqrt(1.0 - rho**2) * orthogonal
    variance = np.empty(steps.size + 1)
    variance[0] = volatility.sigma**2
    kappa = volatility.mean_reversion
    level = volatility.long_run_variance
    xi = volatility.vol_of_vol
    root_steps = np.sqrt(steps)
    for j in range(steps.size):
        positive = max(variance[j], 0.0)
        variance[j + 1] = (
            variance[j]
            + kappa * (level - positive) * steps[j]
            + xi * math.sqrt(positive) * root_steps[j] * shocks[j]
        )
    return np.sqrt(np.maximum(variance, 0.0))


def compute_oracles(grid: np.ndarray, sigma: np.ndarray, jump_sizes: np.ndarray) -> PathOracles:
    """
    Exact functionals of a path: trapezoid integrals over the grid plus jump-ledger sums.

    Parameters:
        grid (np.ndarray): Strictly increasing grid from 0 to T.
        sigma (np.ndarray): Spot volatility on the grid.
        jump_sizes (np.ndarray): Jump sizes of the ledger.

    Returns:
        PathOracles: Integrated variance and quarticity, quadratic variation, jump power sums
        and int |sigma|^3 ds.
    """
    sizes = np.asarray(jump_sizes, dtype=float)
    integrated_variance = float(trapezoid(sigma**2, grid))
    squared = float(np.sum(sizes**2))
    return PathOracles(
        integrated_variance=integrated_variance,
        quadratic_variation=integrated_variance + squared,
        integrated_quarticity=float(trapezoid(sigma**4, grid)),
        squared_jump_sum=squared,
        cubic_jump_sum=float(np.sum(sizes**3)),
        quartic_jump_sum=float(np.sum(sizes**4)),
        abs_cubic_sigma_integral=float(trapezoid(np.abs(sigma) ** 3, grid)),
    )


def simulate_path(
    model: ModelSpec,
    euler_step: float,
    seed: int,
    observation_times: Optional[np.ndarray] = None,
    key: Sequence[int] = (),
) -> PathRecord:
    """
    Simulate a jump-diffusion path with an Euler scheme on a grid containing every jump time.

    dX = b dt + sigma dB + dJ with b = level + sigma2_loading * sigma^2, sigma constant or CIR,
    and J compound Poisson plus deterministic jumps. Volatility and drift are frozen at the left
    end of each Euler step. Jumps are inserted exactly at their times, so `x` is right-continuous
    and `x - xc` moves by exactly the jump size there.

    Parameters:
        model (ModelSpec): The model of X.
        euler_step (float): Largest uniform step of the Euler grid.
        seed (int): Master seed.
        observation_times (np.ndarray, optional): Times that must be grid points; those beyond
            the horizon are ignored.
        key (Sequence[int]): Extra stream indices, e.g. (grid index, replication).

    Returns:
        PathRecord: The path, its jump ledger and its oracle functionals.

    Raises:
        ConfigurationError: If the step is not finite.
        DomainError: If euler_step is not positive or exceeds the horizon.
    """
    if not math.isfinite(euler_step):
        raise ConfigurationError(f"euler_step must be finite, got {euler_step}")
    if euler_step <= 0.0:
        raise DomainError(f"euler_step must be positive, got {euler_step}")
    horizon = model.horizon
    if euler_step > horizon:
        raise DomainError(f"euler_step {euler_step} exceeds the horizon {horizon}")

    rng = stream(seed, StreamLabel.PATH, *key)
    jump_times, jump_sizes = draw_jumps(model.jumps, horizon, rng)

    required = [jump_times]
    if observation_times is not None:
        observed = np.asarray(observation_times, dtype=float)
        required.append(observed[(observed >= 0.0) & (observed <= horizon)])
    grid = build_grid(horizon, euler_step, np.concatenate(required))
    steps = np.diff(grid)

    brownian = rng.standard_normal(steps.size)
    sigma = simulate_volatility(model, steps, brownian, rng)

    xc = np.concatenate([[0.0], np.cumsum(sigma[:-1] * np.sqrt(steps) * brownian)])
    drift_rate = model.drift.level + model.drift.sigma2_loading * sigma[:-1] ** 2
    drift = np.concatenate([[0.0], np.cumsum(drift_rate * steps)])

    jump_index = np.searchsorted(grid, jump_times)
    if jump_times.size and not np.array_equal(grid[jump_index], jump_times):
        raise ConsistencyError("jump times were not inserted into the grid")
    jump_path = np.zeros(grid.size)
    np.add.at(jump_path, jump_index, jump_sizes)
    x = model.x0 + drift + xc + np.cumsum(jump_path)

    ledger = tuple(
        JumpRecord(
            time=float(grid[index]),
            size=float(size),
            sigma_minus=float(sigma[index - 1]),
            sigma_plus=float(sigma[index]),
        )
        for index, size in zip(jump_index, jump_sizes)
    )
    oracles = compute_oracles(grid, sigma, jump_sizes)
    logger.debug(
        f"Simulated path on {grid.size} grid points with {len(ledger)} jumps "
        f"(seed={seed}, key={tuple(key)})"
    )
    return PathRecord(grid=grid, x=x, xc=xc, sigma=sigma, jumps=ledger, oracles=oracles)


def refine_path(path: PathRecord, times: SamplingTimes, seed: int, key: Sequence[int] = ()) -> PathRecord:
    """
    Insert observation times missing from the grid by Brownian-bridge interpolation.

    Inside one Euler step the continuous martingale part is sigma_j times a Brownian motion
    pinned at both ends, and the drift is linear, so the bridge is exact for the frozen scheme.
    Existing grid values, the jump ledger and the oracles are left unchanged.

    Parameters:
        path (PathRecord): A path simulated without the observation times.
        times (SamplingTimes): Observation times to make available on the grid.
        seed (int): Master seed.
        key (Sequence[int]): Extra stream indices.

    Returns:
        PathRecord: The refined path (the same object if nothing was missing).
    """
    grid = path.grid
    observed = times.observed
    observed = observed[observed <= path.horizon]
    missing = np.setdiff1d(observed, grid)
    if missing.size == 0:
        return path

    refined = np.union1d(grid, missing)
    rng = stream(seed, StreamLabel.REFINE, *key)
    free = np.concatenate([[0.0], np.cumsum(np.sqrt(np.diff(refined)) * rng.standard_normal(refined.size - 1))])

    original_position = np.searchsorted(refined, grid)
    is_new = np.ones(refined.size, dtype=bool)
    is_new[original_position] = False
    new_times = refined[is_new]

    left = np.searchsorted(grid, new_times, side="right") - 1
    span = grid[left + 1] - grid[left]
    fraction = (new_times - grid[left]) / span
    free_left = free[original_position[left]]
    free_right = free[original_position[left + 1]]
    bridge = free[is_new] - free_left - fraction * (free_right - free_left)

    jump_at = np.zeros(grid.size)
    if path.jumps:
        np.add.at(
            jump_at,
            np.searchsorted(grid, [jump.time for jump in path.jumps]),
            [jump.size for jump in path.jumps],
        )
    xc_step = path.xc[left + 1] - path.xc[left]
    drift_step = path.x[left + 1] - path.x[left] - xc_step - jump_at[left + 1]
    xc_new = path.xc[left] + fraction * xc_step + path.sigma[left] * bridge
    x_new = path.x[left] + (xc_new - path.xc[left]) + fraction * drift_step

    x = np.empty(refined.size)
    xc = np.empty(refined.size)
    sigma = np.empty(refined.size)
    x[original_position], x[is_new] = path.x, x_new
    xc[original_position], xc[is_new] = path.xc, xc_new
    sigma[original_position], sigma[is_new] = path.sigma, path.sigma[left]

    logger.debug(f"Refined path with {missing.size} bridged observation times")
    return PathRecord(grid=refined, x=x, xc=xc, sigma=sigma, jumps=path.jumps, oracles=path.oracles)
