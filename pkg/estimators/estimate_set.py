from typing import Optional

import numpy as np

from errors import DegenerateDenominatorError
from estimators.power_variation import increments_of, realized_skewness
from estimators.preaverage import choose_kn, noisy_skew, pcv_from, preaverage_values, prv_from
from kernels.kernel_constants import kernel_constants
from logging_setup import get_logger
from models.estimates import EstimateSet, ObservedSeries, Tuning
from models.kernel import KernelConstants, KernelSpec

# Get configured logger for this module
logger = get_logger(__name__)


def estimate_all(
    series: ObservedSeries,
    delta_n: float,
    horizon: float,
    theta: Optional[float] = None,
    kernel: Optional[KernelSpec] = None,
    constants: Optional[KernelConstants] = None,
    check_identity: bool = True,
) -> EstimateSet:
    """
    Compute every estimator on one observed series.

    Raw power variations are always computed. Realized skewness is skipped (and "rv" recorded
    in `failures`) when RV is degenerate. Pre-averaged estimators are computed when `theta`
    is given; PRV/PCV are skipped with failure "k_n" when the window exceeds the series and
    the noisy skewness is skipped with failure "prv" when PRV is at or below its guard.

    Parameters:
        series (ObservedSeries): The observations.
        delta_n (float): Sampling step Delta_n.
        horizon (float): Horizon T.
        theta (float, optional): Pre-averaging tuning constant.
        kernel (KernelSpec, optional): Weight function, MinKernel by default.
        constants (KernelConstants, optional): Constants of the kernel; computed when missing.
        check_identity (bool): Assert the summation-by-parts identity on every window.

    Returns:
        EstimateSet: All estimates with their tuning and failure labels.
    """
    increments = increments_of(series)
    failures = []
    cubes = increments**3
    rv = float(np.sum(increments**2))
    values = dict(
        rv=rv,
        cubic_pv=float(np.sum(cubes)),
        abs_cubic_pv=float(np.sum(np.abs(increments) ** 3)),
    )

    try:
        skewness = realized_skewness(series, delta_n, horizon)
        values.update(
            rdskew_raw=skewness.raw,
            rdskew_scaled=skewness.scaled,
            rdskew_raw_event_count=skewness.raw_event_count,
        )
    except DegenerateDenominatorError:
        failures.append("rv")

    k_n = None
    kernel_id = None
    if theta is not None:
        kernel = kernel or KernelSpec()
        constants = constants or kernel_constants(kernel)
        kernel_id = kernel.kernel_id
        k_n = choose_kn(theta, delta_n)
        observed = series.values[: series.times.n_count + 1]
        if observed.size < k_n:
            failures.append("k_n")
            logger.warning(f"k_n={k_n} exceeds the {observed.size} observations; pre-averaging skipped")
        else:
            bars = preaverage_values(observed, k_n, kernel, check_identity)
            values["prv"] = prv_from(bars, increments, k_n, constants)
            values["pcv"] = pcv_from(bars, k_n, constants)
            try:
                values["noisy_skew"] = noisy_skew(values["prv"], values["pcv"])
            except DegenerateDenominatorError:
                failures.append("prv")

    logger.debug(f"Estimated {len(values)} statistics on {increments.size} increments (k_n={k_n})")
    return EstimateSet(
        **values,
        failures=tuple(failures),
        tuning=Tuning(delta_n=delta_n, theta=theta, k_n=k_n, kernel_id=kernel_id),
    )
