import math
from typing import Callable, Optional, Union

import numpy as np

from errors import DegenerateDenominatorError, DomainError
from logging_setup import get_logger
from models.estimates import ObservedSeries, RealizedSkewness
from simkit.generate_times import FLOOR_EPSILON

# Get configured logger for this module
logger = get_logger(__name__)

RV_GUARD = 1e-12

TestFunction = Union[str, Callable[[np.ndarray], np.ndarray]]


def g_a(x: np.ndarray, a: float) -> np.ndarray:
    """g_a(x) = |x|^3 sin(2a log|x|), extended by its limit 0 at x = 0."""
    x = np.asarray(x, dtype=float)
    magnitude = np.abs(x)
    with np.errstate(divide="ignore", invalid="ignore"):
        values = magnitude**3 * np.sin(2.0 * a * np.log(magnitude))
    return np.where(magnitude > 0.0, values, 0.0)


def _square(x):
    return x**2


def _cube(x):
    return x**3


def _abs_cube(x):
    return np.abs(x) ** 3


TEST_FUNCTIONS: dict[str, Callable[[np.ndarray], np.ndarray]] = {
    "square": _square,
    "cube": _cube,
    "abs_cube": _abs_cube,
}


def floor_count(delta_n: float, horizon: float) -> int:
    """floor(T / Delta_n)."""
    return math.floor(horizon / delta_n + FLOOR_EPSILON)


def _resolve(g_fn: TestFunction, a: Optional[float]) -> Callable[[np.ndarray], np.ndarray]:
    if callable(g_fn):
        return g_fn
    if g_fn == "g_a":
        if a is None or a == 0.0:
            raise DomainError("g_a needs a nonzero parameter a")
        return lambda x: g_a(x, a)
    if g_fn not in TEST_FUNCTIONS:
        raise DomainError(f"unknown test function {g_fn!r}")
    return TEST_FUNCTIONS[g_fn]


def increments_of(series: ObservedSeries) -> np.ndarray:
    if series.times.n_count < 1:
        raise DomainError("a power variation needs at least two observations inside the horizon")
    return series.increments


def power_variation(series: ObservedSeries, g_fn: TestFunction, a: Optional[float] = None) -> float:
    """
    Sum of g over the increments Y_{t_i} - Y_{t_{i-1}}, i = 1..N_T.

    Parameters:
        series (ObservedSeries): The observations.
        g_fn: "square", "cube", "abs_cube", "g_a" (with `a`) or any vectorized callable.
        a (float, optional): Parameter of g_a.

    Returns:
        float: The power variation.

    Raises:
        DomainError: If fewer than two observations lie inside the horizon or g_fn is unknown.
    """
    function = _resolve(g_fn, a)
    return float(np.sum(function(increments_of(series))))


def realized_skewness(series: ObservedSeries, delta_n: float, horizon: float) -> RealizedSkewness:
    """
    Realized skewness floor(T/Delta_n) * sum d^3 / (sum d^2)^{3/2} and its scaled version.

    The scaled value sum d^3 / (sum d^2)^{3/2} estimates sum (Delta X)^3 / [X,X]_T^{3/2}.
    For irregular times `raw_event_count` multiplies by N_T instead of floor(T/Delta_n).

    Raises:
        DegenerateDenominatorError: If sum d^2 is at or below 1e-12.
    """
    if delta_n <= 0.0:
        raise DomainError(f"delta_n must be positive, got {delta_n}")
    rv = power_variation(series, "square")
    if rv <= RV_GUARD:
        logger.warning(f"Realized volatility {rv!r} below guard; realized skewness undefined")
        raise DegenerateDenominatorError("rv", rv, RV_GUARD)
    ratio = power_variation(series, "cube") / rv**1.5
    return RealizedSkewness(
        raw=floor_count(delta_n, horizon) * ratio,
        scaled=ratio,
        raw_event_count=series.times.n_count * ratio,
    )
