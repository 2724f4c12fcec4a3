import numpy as np
import pytest

from errors import ConsistencyError, DegenerateDenominatorError, DomainError
from estimators.preaverage import (
    choose_kn,
    noisy_skew,
    pcv,
    pcv_from,
    preaverage,
    preaverage_values,
    prv,
    prv_from,
    summation_by_parts,
)
from kernels.kernel_constants import kernel_constants
from kernels.kernel_functions import eval_kernel
from models.estimates import ObservedSeries
from models.kernel import KernelConstants, KernelSpec
from simkit.generate_times import equidistant_times, sampling_times_from
from simkit.rng import StreamLabel, stream


def constants_with(psi1=1.0, psi2=1.0, psi3=1.0):
    zeros = dict.fromkeys(
        (
            "phi22", "phi12", "phi11", "phi3_plus", "phi3_minus", "phi3_minus_unsquared",
            "phi3p_plus", "phi3p_minus", "phi23_plus", "phi23_minus", "phi23p_plus", "phi23p_minus",
        ),
        0.0,
    )
    return KernelConstants(kernel_id="test", psi1=psi1, psi2=psi2, psi3=psi3, quad_panels=0, **zeros)


def random_walk(size, seed=0, scale=0.01):
    return np.concatenate([[0.0], np.cumsum(scale * stream(seed, StreamLabel.PATH).standard_normal(size - 1))])


def series_of(values, delta_n=1.0):
    times = np.arange(len(values)) * delta_n
    return ObservedSeries(times=sampling_times_from(times, float(times[-1]), delta_n), values=np.asarray(values))


@pytest.mark.parametrize("theta,delta_n,expected", [(1.0, 0.01, 10), (0.5, 1e-4, 50), (0.01, 0.01, 2)])
def test_choose_kn(theta, delta_n, expected):
    assert choose_kn(theta, delta_n) == expected


def test_choose_kn_rejects_non_positive_inputs():
    with pytest.raises(DomainError):
        choose_kn(0.0, 0.01)
    with pytest.raises(DomainError):
        choose_kn(1.0, 0.0)


def test_preaverage_of_a_linear_series():
    # Min kernel weights for k_n = 4 are 1/4, 1/2, 1/4 and sum to one.
    values = 0.5 * np.arange(11.0)
    bars = preaverage(series_of(values), 4, KernelSpec())
    assert bars.size == 10 - 4 + 2
    np.testing.assert_allclose(bars, 0.5)


def test_preaverage_matches_the_summation_by_parts_form():
    values = random_walk(2000, seed=3)
    for k_n in (2, 7, 40):
        bars = preaverage_values(values, k_n, KernelSpec(), check_identity=True)
        by_parts, _ = summation_by_parts(values, k_n, KernelSpec())
        np.testing.assert_allclose(bars, by_parts, atol=1e-14)


def test_identity_violation_raises(mocker):
    values = random_walk(50, seed=4)
    by_parts, scale = summation_by_parts(values, 5, KernelSpec())
    mocker.patch("estimators.preaverage.summation_by_parts", return_value=(by_parts + 1.0, scale))
    with pytest.raises(ConsistencyError):
        preaverage_values(values, 5, KernelSpec())


def test_window_length_is_checked():
    series = series_of(random_walk(10))
    with pytest.raises(DomainError):
        preaverage(series, 11, KernelSpec())
    with pytest.raises(DomainError):
        preaverage(series, 1, KernelSpec())


def test_prv_and_pcv_formulas():
    bars = np.array([1.0, 2.0])
    assert prv_from(bars, np.array([1.0, 1.0]), 2, constants_with(psi1=1.0, psi2=0.5)) == pytest.approx(4.5)
    assert pcv_from(bars, 2, constants_with(psi3=0.5)) == pytest.approx(9.0)


def test_noisy_skew_guard():
    assert noisy_skew(4.0, 2.0) == pytest.approx(0.25)
    for value in (0.0, -0.5, 1e-11):
        with pytest.raises(DegenerateDenominatorError):
            noisy_skew(value, 1.0)


def test_prv_recovers_integrated_variance_without_noise():
    """sigma = 0.3 Brownian motion: PRV converges to 0.09 at rate Delta_n^{1/4}."""
    delta_n = 1e-5
    times = equidistant_times(delta_n, 1.0)
    values = np.concatenate([[0.0], np.cumsum(0.3 * np.sqrt(delta_n) * stream(11, StreamLabel.PATH).standard_normal(times.size - 1))])
    series = ObservedSeries(times=sampling_times_from(times, 1.0, delta_n), values=values)
    constants = kernel_constants(KernelSpec(), 512)
    value = prv(series, choose_kn(1.0, delta_n), KernelSpec(), constants, check_identity=False)
    assert value == pytest.approx(0.09, rel=0.25)


def test_summation_by_parts_over_random_windows():
    """1000 windows of random length and content agree with the direct weighted sum to 1e-12."""
    rng = stream(21, StreamLabel.PATH)
    kernel = KernelSpec()
    for _ in range(1000):
        k_n = int(rng.integers(2, 81))
        values = np.cumsum(rng.standard_normal(k_n) * rng.uniform(1e-4, 10.0))
        increments = np.diff(values)
        weights = np.asarray(eval_kernel(kernel, np.arange(1, k_n) / k_n))
        direct = float(weights @ increments)
        by_parts, scale = summation_by_parts(values, k_n, kernel)
        assert by_parts.size == 1
        bound = 1e-12 * (scale[0] + float(np.abs(weights) @ np.abs(increments)))
        assert abs(by_parts[0] - direct) <= bound
        assert abs(preaverage_values(values, k_n, kernel, check_identity=False)[0] - direct) <= bound


def jumpy_series(seed=6, delta_n=1e-4):
    times = equidistant_times(delta_n, 1.0)
    values = random_walk(times.size, seed=seed) + np.where(times >= 0.5, 0.3, 0.0)
    return ObservedSeries(times=sampling_times_from(times, 1.0, delta_n), values=values)


def test_prv_is_even_and_pcv_is_odd_under_negation():
    series = jumpy_series()
    flipped = ObservedSeries(times=series.times, values=-series.values)
    constants = kernel_constants(KernelSpec(), 512)
    assert prv(flipped, 100, KernelSpec(), constants) == prv(series, 100, KernelSpec(), constants)
    value = pcv(series, 100, KernelSpec(), constants)
    assert value != 0.0
    assert pcv(flipped, 100, KernelSpec(), constants) == -value


@pytest.mark.parametrize("factor", [3.0, 0.25])
def test_prv_and_pcv_scale_with_their_degree(factor):
    series = jumpy_series(seed=7)
    rescaled = ObservedSeries(times=series.times, values=factor * series.values)
    constants = kernel_constants(KernelSpec(), 512)
    assert prv(rescaled, 100, KernelSpec(), constants) == pytest.approx(
        factor**2 * prv(series, 100, KernelSpec(), constants), rel=1e-10
    )
    assert pcv(rescaled, 100, KernelSpec(), constants) == pytest.approx(
        factor**3 * pcv(series, 100, KernelSpec(), constants), rel=1e-10
    )


def test_prv_of_pure_noise_is_centered():
    """X = 0 and Gaussian noise of variance 1e-4: the noise correction removes the bias."""
    delta_n = 1e-5
    times = sampling_times_from(equidistant_times(delta_n, 1.0), 1.0, delta_n)
    constants = kernel_constants(KernelSpec(), 512)
    k_n = choose_kn(1.0, delta_n)
    values = []
    for replication in range(100):
        noise = 1e-2 * stream(12, StreamLabel.NOISE, replication).standard_normal(times.times.size)
        series = ObservedSeries(times=times, values=noise)
        values.append(prv(series, k_n, KernelSpec(), constants, check_identity=False))
    values = np.array(values)
    standard_error = values.std(ddof=1) / np.sqrt(values.size)
    assert abs(values.mean()) <= 3.0 * standard_error


def test_pcv_of_a_single_unit_jump_is_one():
    """sigma = 0 and one jump of size 1: PCV and PRV both recover 1 up to the Riemann-sum error."""
    delta_n = 1e-4
    times = equidistant_times(delta_n, 1.0)
    series = ObservedSeries(
        times=sampling_times_from(times, 1.0, delta_n), values=np.where(times >= 0.5, 1.0, 0.0)
    )
    constants = kernel_constants(KernelSpec(), 512)
    k_n = choose_kn(1.0, delta_n)
    assert k_n == 100
    assert pcv(series, k_n, KernelSpec(), constants) == pytest.approx(1.0, rel=1e-3)
    assert prv(series, k_n, KernelSpec(), constants) == pytest.approx(1.0, rel=2e-3)
