import numpy as np
import pytest

from estimators.estimate_set import estimate_all
from kernels.kernel_constants import kernel_constants
from models.estimates import ObservedSeries
from models.kernel import KernelSpec
from simkit.generate_times import equidistant_times, sampling_times_from
from simkit.rng import StreamLabel, stream

CONSTANTS = kernel_constants(KernelSpec(), 512)


def noisy_series(delta_n=1e-3, seed=0):
    times = equidistant_times(delta_n, 1.0)
    rng = stream(seed, StreamLabel.PATH)
    latent = np.concatenate([[0.0], np.cumsum(0.3 * np.sqrt(delta_n) * rng.standard_normal(times.size - 1))])
    values = latent + 1e-3 * rng.standard_normal(times.size)
    return ObservedSeries(times=sampling_times_from(times, 1.0, delta_n), values=values, is_noisy=True)


def test_raw_estimates_only_without_theta():
    series = noisy_series()
    estimates = estimate_all(series, 1e-3, 1.0)
    increments = np.diff(series.values)
    assert estimates.rv == pytest.approx(float(np.sum(increments**2)))
    assert estimates.cubic_pv == pytest.approx(float(np.sum(increments**3)))
    assert estimates.abs_cubic_pv == pytest.approx(float(np.sum(np.abs(increments) ** 3)))
    assert estimates.rdskew_scaled == pytest.approx(estimates.cubic_pv / estimates.rv**1.5)
    assert estimates.rdskew_raw == pytest.approx(1000 * estimates.rdskew_scaled)
    assert estimates.prv is None and estimates.noisy_skew is None
    assert estimates.failures == ()
    assert estimates.tuning.k_n is None


def test_pre_averaged_estimates_with_theta():
    estimates = estimate_all(noisy_series(), 1e-3, 1.0, theta=0.5, kernel=KernelSpec(), constants=CONSTANTS)
    assert estimates.tuning.k_n == 16
    assert estimates.tuning.kernel_id == "min"
    assert estimates.prv is not None and estimates.pcv is not None
    assert estimates.noisy_skew == pytest.approx(estimates.pcv / estimates.prv**1.5)


def test_window_longer_than_the_series_is_recorded():
    estimates = estimate_all(noisy_series(delta_n=0.01), 0.01, 1.0, theta=20.0, constants=CONSTANTS)
    assert "k_n" in estimates.failures
    assert estimates.prv is None


def test_constant_series_records_both_degenerate_denominators():
    times = equidistant_times(0.01, 1.0)
    series = ObservedSeries(times=sampling_times_from(times, 1.0, 0.01), values=np.ones(times.size))
    estimates = estimate_all(series, 0.01, 1.0, theta=0.1, constants=CONSTANTS)
    assert estimates.failures == ("rv", "prv")
    assert estimates.rdskew_raw is None
    assert estimates.prv == 0.0
