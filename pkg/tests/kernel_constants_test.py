import numpy as np
import pytest

from errors import DomainError, KernelValidityError
from kernels.kernel_constants import kernel_constants, outer_knots, phi_uv
from models.kernel import KernelSpec

PANELS = 512


def test_min_kernel_closed_forms():
    constants = kernel_constants(KernelSpec(), PANELS)
    assert constants.kernel_id == "min"
    assert constants.quad_panels == PANELS
    assert constants.psi1 == pytest.approx(1.0, rel=1e-9)
    assert constants.psi2 == pytest.approx(1.0 / 12.0, rel=1e-9)
    assert constants.psi3 == pytest.approx(1.0 / 32.0, rel=1e-9)
    assert constants.phi22 == pytest.approx(151.0 / 80640.0, rel=1e-6)
    assert constants.phi12 == pytest.approx(1.0 / 96.0, rel=1e-6)
    assert constants.phi11 == pytest.approx(1.0 / 6.0, rel=1e-6)


def test_polynomial_form_of_the_min_kernel_gives_the_same_constants():
    polynomial = KernelSpec(
        form="piecewise_polynomial", breakpoints=(0.0, 0.5, 1.0), coefficients=((0.0, 1.0), (1.0, -1.0))
    )
    expected = kernel_constants(KernelSpec(), PANELS)
    actual = kernel_constants(polynomial, PANELS)
    for field in ("psi2", "psi3", "phi22", "phi12", "phi11", "phi3_plus", "phi23p_minus"):
        assert getattr(actual, field) == pytest.approx(getattr(expected, field), rel=1e-12)


def test_constants_scale_homogeneously():
    """Scaling g by 2 multiplies each constant by 2 to the number of g factors."""
    base = kernel_constants(KernelSpec(), PANELS)
    scaled = kernel_constants(KernelSpec(scale=2.0), PANELS)
    assert scaled.kernel_id == "min*2"
    assert scaled.psi2 == pytest.approx(4.0 * base.psi2)
    assert scaled.psi3 == pytest.approx(8.0 * base.psi3)
    assert scaled.phi22 == pytest.approx(16.0 * base.phi22)
    assert scaled.phi11 == pytest.approx(16.0 * base.phi11)
    assert scaled.phi3_plus == pytest.approx(64.0 * base.phi3_plus)
    assert scaled.phi23_plus == pytest.approx(32.0 * base.phi23_plus)


def test_min_kernel_symmetry_links_plus_and_minus_constants():
    # g(1 - x) = g(x) maps phi_{g,g^2} onto phi_{g^2,g}.
    constants = kernel_constants(KernelSpec(), PANELS)
    assert constants.phi3_plus == pytest.approx(constants.phi3_minus, rel=1e-9)
    assert constants.phi23_plus == pytest.approx(constants.phi23_minus, rel=1e-9)
    assert constants.phi3_minus > 0.0
    assert constants.phi3_minus_unsquared > 0.0


def test_phi_at_special_points():
    kernel = KernelSpec()
    assert phi_uv(kernel, "g", "g", 0.0, PANELS) == pytest.approx(1.0 / 12.0)
    assert phi_uv(kernel, "g", "g", 0.5, PANELS) == pytest.approx(1.0 / 48.0)
    assert phi_uv(kernel, "g", "g", 1.0, PANELS) == pytest.approx(0.0, abs=1e-15)


def test_phi_of_derivatives_is_piecewise_linear():
    y = np.array([0.1, 0.2, 0.4, 0.6, 0.9])
    expected = np.where(y <= 0.5, 1.0 - 3.0 * y, y - 1.0)
    np.testing.assert_allclose(phi_uv(KernelSpec(), "dg", "dg", y, PANELS), expected, atol=1e-12)


def test_outer_knots_of_the_min_kernel():
    np.testing.assert_array_equal(outer_knots(KernelSpec()), [0.0, 0.5, 1.0])


def test_panel_budget_is_checked():
    with pytest.raises(DomainError):
        kernel_constants(KernelSpec(), 63)
    with pytest.raises(DomainError):
        kernel_constants(KernelSpec(), 65)
    with pytest.raises(DomainError):
        phi_uv(KernelSpec(), "g", "g", 0.5, 3)
    with pytest.raises(DomainError):
        phi_uv(KernelSpec(), "g", "g", 1.5, PANELS)


def test_invalid_kernel_raises():
    with pytest.raises(KernelValidityError):
        kernel_constants(KernelSpec(form="sine"), PANELS)
