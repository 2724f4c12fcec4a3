import numpy as np
import pytest

from kernels.quadrature import panels_per_piece, piecewise_simpson


@pytest.mark.parametrize("panels,pieces,expected", [(100, 4, 24), (10, 3, 2), (1, 0, 2), (64, 1, 64)])
def test_panels_per_piece_is_even_and_at_least_two(panels, pieces, expected):
    assert panels_per_piece(panels, pieces) == expected


def test_simpson_is_exact_for_cubics_on_each_piece():
    def integrand(points, midpoints):
        return points**3 + points**2

    value = piecewise_simpson(integrand, np.array([0.0, 0.5]), np.array([0.5, 1.0]), 8)
    assert value == pytest.approx(0.25 + 1.0 / 3.0, abs=1e-15)


def test_midpoints_select_one_sided_values():
    # A step at 0.5: the right piece must see the right value at its left end point.
    def integrand(points, midpoints):
        return np.where(midpoints < 0.5, 1.0, -1.0) * np.ones_like(points)

    value = piecewise_simpson(integrand, np.array([0.0, 0.5]), np.array([0.5, 1.0]), 8)
    assert value == pytest.approx(0.0, abs=1e-15)


def test_batched_pieces_and_empty_pieces():
    starts = np.array([[0.0, 1.0], [0.0, 0.0]])
    ends = np.array([[1.0, 1.0], [2.0, 0.0]])
    values = piecewise_simpson(lambda points, midpoints: points, starts, ends, 16)
    np.testing.assert_allclose(values, [0.5, 2.0])
