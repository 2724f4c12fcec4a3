import numpy as np
import pytest

from errors import DomainError
from kernels.kernel_functions import eval_kernel, eval_kernel_deriv, psi_integral, validate_kernel
from models.kernel import KernelSpec


def test_min_kernel_values():
    kernel = KernelSpec()
    assert eval_kernel(kernel, 0.25) == 0.25
    assert eval_kernel(kernel, 0.5) == 0.5
    assert eval_kernel(kernel, 0.0) == 0.0
    assert eval_kernel(kernel, 1.0) == 0.0
    np.testing.assert_allclose(eval_kernel(kernel, np.array([0.1, 0.9])), [0.1, 0.1])


def test_min_kernel_derivative_takes_right_limits():
    kernel = KernelSpec()
    assert eval_kernel_deriv(kernel, 0.25) == 1.0
    assert eval_kernel_deriv(kernel, 0.75) == -1.0
    assert eval_kernel_deriv(kernel, 0.5) == -1.0
    assert eval_kernel_deriv(kernel, 1.0) == -1.0


@pytest.mark.parametrize("x", [-0.1, 1.5, float("nan")])
def test_arguments_outside_the_unit_interval(x):
    with pytest.raises(DomainError):
        eval_kernel(KernelSpec(), x)
    with pytest.raises(DomainError):
        eval_kernel_deriv(KernelSpec(), x)


def test_psi_integrals_of_the_min_kernel():
    kernel = KernelSpec()
    assert psi_integral(kernel, "dg", "dg", 512) == pytest.approx(1.0)
    assert psi_integral(kernel, "g", "g", 512) == pytest.approx(1.0 / 12.0)
    assert psi_integral(kernel, "g", "g2", 512) == pytest.approx(1.0 / 32.0)


def test_min_kernel_is_valid():
    report = validate_kernel(KernelSpec())
    assert report.valid
    assert report.failures() == []


def test_sine_kernel_has_vanishing_cubic_integral():
    """sin(2 pi x) is odd around 1/2, so int g^3 = 0."""
    report = validate_kernel(KernelSpec(form="sine"))
    assert report.boundary_zeros and report.continuous
    assert not report.psi3_nonzero
    assert report.failures() == ["int g^3 != 0"]


def test_identity_kernel_fails_the_boundary_check():
    kernel = KernelSpec(form="piecewise_polynomial", breakpoints=(0.0, 1.0), coefficients=((0.0, 1.0),))
    report = validate_kernel(kernel)
    assert not report.boundary_zeros
    assert not report.valid


def test_discontinuous_kernel_is_flagged():
    kernel = KernelSpec(
        form="piecewise_polynomial", breakpoints=(0.0, 0.5, 1.0), coefficients=((0.0, 1.0), (0.0,))
    )
    report = validate_kernel(kernel)
    assert report.boundary_zeros
    assert not report.continuous


def test_kernel_spec_rejects_mismatched_pieces():
    with pytest.raises(ValueError):
        KernelSpec(form="piecewise_polynomial", breakpoints=(0.0, 0.5, 1.0), coefficients=((0.0, 1.0),))
    with pytest.raises(ValueError):
        KernelSpec(form="piecewise_polynomial", breakpoints=(0.0, 0.7), coefficients=((0.0, 1.0),))
