"""
Composite Simpson quadrature over pieces mapped from a reference interval.

Each piece [a, b] is integrated as (b - a) * int_0^1 f(a + (b - a) s) ds with the same
reference nodes s for every piece, so a batch of pieces (including empty ones) is a
single vectorized call.
"""

from typing import Callable

import numpy as np
from scipy.integrate import simpson

DEFAULT_PANELS = 4096


def panels_per_piece(panels: int, pieces: int) -> int:
    """Split a panel budget over pieces, keeping an even count of at least 2 per piece."""
    share = panels // max(pieces, 1)
    return max(2, share - share % 2)


def piece_nodes(starts: np.ndarray, ends: np.ndarray, panels: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Quadrature nodes of every piece.

    Returns:
        tuple: Reference nodes s (n + 1,), piece lengths (..., m) and points (..., m, n + 1).
    """
    starts = np.asarray(starts, dtype=float)
    ends = np.asarray(ends, dtype=float)
    reference = np.linspace(0.0, 1.0, panels_per_piece(panels, starts.shape[-1]) + 1)
    lengths = ends - starts
    return reference, lengths, starts[..., None] + lengths[..., None] * reference


def integrate_pieces(values: np.ndarray, reference: np.ndarray, lengths: np.ndarray) -> np.ndarray:
    """Sum over pieces of length * Simpson(values on the reference nodes)."""
    return np.sum(lengths * simpson(values, x=reference, axis=-1), axis=-1)


def piecewise_simpson(
    integrand: Callable[[np.ndarray, np.ndarray], np.ndarray],
    starts: np.ndarray,
    ends: np.ndarray,
    panels: int,
) -> np.ndarray:
    """
    Integrate over consecutive pieces and sum over the last axis of `starts`/`ends`.

    Parameters:
        integrand: Called as integrand(points, midpoints) with points of shape (..., m, n + 1)
            and the piece midpoints of shape (..., m, 1); the midpoints identify the
            polynomial piece so that end points take one-sided limits.
        starts (np.ndarray): Left ends, shape (..., m).
        ends (np.ndarray): Right ends, same shape.
        panels (int): Total panel budget split across the m pieces.

    Returns:
        np.ndarray: Integral over the union of the pieces, shape (...).
    """
    reference, lengths, points = piece_nodes(starts, ends, panels)
    midpoints = (np.asarray(starts, dtype=float) + 0.5 * lengths)[..., None]
    return integrate_pieces(integrand(points, midpoints), reference, lengths)
