import math

import numpy as np
import pytest

from errors import DomainError
from harness.statistics import coverage, ks_distance, rate_regression


def test_ks_distance_extremes():
    sample = np.linspace(0.0, 1.0, 50)
    assert ks_distance(sample, sample) == 0.0
    assert ks_distance(sample, sample + 10.0) == 1.0


def test_ks_distance_drops_non_finite_values():
    assert ks_distance([0.0, 1.0, math.nan], [0.0, 1.0, math.inf]) == 0.0
    with pytest.raises(DomainError):
        ks_distance([math.nan], [0.0])


def test_coverage_counts_covering_intervals():
    # The 95% half width is 1.96 at unit variance and Delta_n = 1.
    rate = coverage([0.0, 10.0, 5.0], [0.0, 0.0, 0.0], [1.0, 1.0, 0.0], 1.0, 0.5)
    assert rate == 0.5


def test_coverage_needs_a_usable_replication_and_a_valid_level():
    with pytest.raises(DomainError):
        coverage([0.0], [0.0], [0.0], 1.0, 0.5)
    with pytest.raises(DomainError):
        coverage([0.0], [0.0], [1.0], 1.0, 0.5, level=1.0)


def test_coverage_inputs_must_have_equal_lengths():
    with pytest.raises(DomainError):
        coverage([0.0, 1.0], [0.0, 1.0, 2.0], [1.0, 1.0], 1.0, 0.5)
    with pytest.raises(DomainError):
        coverage([0.0, 1.0], [0.0, 1.0], [1.0], 1.0, 0.5)


def test_rate_regression_recovers_the_exponent():
    steps = np.array([1e-2, 1e-3, 1e-4])
    assert rate_regression(steps, 2.0 * steps**0.5) == pytest.approx(0.5)
    assert rate_regression(steps, 3.0 * steps**0.25) == pytest.approx(0.25)


def test_rate_regression_input_checks():
    with pytest.raises(DomainError):
        rate_regression([1e-2, 1e-3], [1.0, 0.5])
    with pytest.raises(DomainError):
        rate_regression([1e-2, 1e-3, 1e-4], [1.0, 0.0, 0.5])
