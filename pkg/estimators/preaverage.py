import math

import numpy as np

from errors import ConsistencyError, DegenerateDenominatorError, DomainError
from kernels.kernel_functions import eval_kernel
from logging_setup import get_logger
from models.estimates import ObservedSeries
from models.kernel import KernelConstants, KernelSpec

# Get configured logger for this module
logger = get_logger(__name__)

PRV_GUARD = 1e-10
IDENTITY_TOLERANCE = 1e-12
# Windows per block when checking the summation-by-parts form
_WINDOW_BLOCK = 4096


def choose_kn(theta: float, delta_n: float) -> int:
    """k_n = max(2, round(theta * Delta_n^{-1/2}))."""
    if not theta > 0.0:
        raise DomainError(f"theta must be positive, got {theta}")
    if not delta_n > 0.0:
        raise DomainError(f"delta_n must be positive, got {delta_n}")
    return max(2, int(round(theta / math.sqrt(delta_n))))


def kernel_grid(kernel: KernelSpec, k_n: int) -> np.ndarray:
    """g(p / k_n) for p = 0..k_n."""
    return np.asarray(eval_kernel(kernel, np.arange(k_n + 1) / k_n))


def _observed_values(series: ObservedSeries, k_n: int) -> np.ndarray:
    if k_n < 2:
        raise DomainError(f"k_n must be at least 2, got {k_n}")
    values = series.values[: series.times.n_count + 1]
    if values.size < k_n:
        raise DomainError(f"k_n={k_n} exceeds the {values.size} observations inside the horizon")
    return values


def summation_by_parts(values: np.ndarray, k_n: int, kernel: KernelSpec) -> tuple[np.ndarray, np.ndarray]:
    """
    The pre-averaged values in the form -sum_{p=0}^{k_n-1} (g((p+1)/k_n) - g(p/k_n)) (V_{i+p} - V_i).

    Returns:
        tuple[np.ndarray, np.ndarray]: The values and the sums of absolute terms (their rounding scale).
    """
    weight_steps = np.diff(kernel_grid(kernel, k_n))
    windows = values.size - k_n + 1
    offsets = np.arange(k_n)
    result = np.empty(windows)
    scale = np.empty(windows)
    for begin in range(0, windows, _WINDOW_BLOCK):
        index = np.arange(begin, min(begin + _WINDOW_BLOCK, windows))
        spread = values[index[:, None] + offsets[None, :]] - values[index, None]
        result[index] = -(spread @ weight_steps)
        scale[index] = np.abs(spread) @ np.abs(weight_steps)
    return result, scale


def preaverage_values(values: np.ndarray, k_n: int, kernel: KernelSpec, check_identity: bool = True) -> np.ndarray:
    """
    V_bar_i = sum_{p=1}^{k_n-1} g(p/k_n) (V_{i+p} - V_{i+p-1}) for i = 0..N-k_n+1.

    With `check_identity` every window is compared with its summation-by-parts form.

    Raises:
        ConsistencyError: If the two forms differ by more than 1e-12 relative to their terms.
    """
    weights = kernel_grid(kernel, k_n)[1:-1]
    increments = np.diff(values)
    bars = np.convolve(increments, weights[::-1], mode="valid")
    if check_identity:
        by_parts, by_parts_scale = summation_by_parts(values, k_n, kernel)
        direct_scale = np.convolve(np.abs(increments), np.abs(weights)[::-1], mode="valid")
        gap = np.abs(bars - by_parts)
        allowed = IDENTITY_TOLERANCE * (by_parts_scale + direct_scale)
        if (gap > allowed).any():
            worst = int(np.argmax(gap - allowed))
            logger.error(f"Summation by parts fails at window {worst}: {bars[worst]!r} vs {by_parts[worst]!r}")
            raise ConsistencyError(f"pre-averaging identity violated at window {worst}")
    return bars


def preaverage(series: ObservedSeries, k_n: int, kernel: KernelSpec, check_identity: bool = True) -> np.ndarray:
    """
    Pre-average an observed series over windows of k_n observations.

    Parameters:
        series (ObservedSeries): Observations; only t_0..t_N inside the horizon are used.
        k_n (int): Window length, at least 2 and at most the number of observations.
        kernel (KernelSpec): Weight function g.
        check_identity (bool): Assert the summation-by-parts form for every window.

    Returns:
        np.ndarray: V_bar_i for i = 0..N-k_n+1.

    Raises:
        DomainError: If k_n is below 2 or exceeds the series length.
        ConsistencyError: If the identity check fails.
    """
    return preaverage_values(_observed_values(series, k_n), k_n, kernel, check_identity)


def prv_from(bars: np.ndarray, increments: np.ndarray, k_n: int, constants: KernelConstants) -> float:
    """(psi2 k)^{-1} sum V_bar^2 - psi1 / (2 psi2 k^2) sum (Delta Y)^2."""
    signal = float(np.sum(bars**2)) / (constants.psi2 * k_n)
    correction = constants.psi1 / (2.0 * constants.psi2 * k_n**2) * float(np.sum(increments**2))
    return signal - correction


def pcv_from(bars: np.ndarray, k_n: int, constants: KernelConstants) -> float:
    """(psi3 k)^{-1} sum V_bar^3."""
    return float(np.sum(bars**3)) / (constants.psi3 * k_n)


def prv(
    series: ObservedSeries,
    k_n: int,
    kernel: KernelSpec,
    constants: KernelConstants,
    check_identity: bool = True,
) -> float:
    """
    Pre-averaged realized volatility, a noise-robust estimator of [X,X]_T.

    The noise correction can overshoot in small samples; negative values are returned as they are.

    Raises:
        DomainError: If k_n exceeds the series length.
    """
    values = _observed_values(series, k_n)
    bars = preaverage_values(values, k_n, kernel, check_identity)
    return prv_from(bars, np.diff(values), k_n, constants)


def pcv(
    series: ObservedSeries,
    k_n: int,
    kernel: KernelSpec,
    constants: KernelConstants,
    check_identity: bool = True,
) -> float:
    """
    Pre-averaged cubic power variation, a noise-robust estimator of sum (Delta X)^3.

    Raises:
        DomainError: If k_n exceeds the series length.
    """
    values = _observed_values(series, k_n)
    return pcv_from(preaverage_values(values, k_n, kernel, check_identity), k_n, constants)


def noisy_skew(prv_value: float, pcv_value: float) -> float:
    """
    PCV / PRV^{3/2}.

    Raises:
        DegenerateDenominatorError: If PRV is at or below 1e-10 (including negative PRV).
    """
    if not prv_value > PRV_GUARD:
        logger.warning(f"PRV {prv_value!r} below guard; noisy skewness undefined")
        raise DegenerateDenominatorError("prv", prv_value, PRV_GUARD)
    return pcv_value / prv_value**1.5
