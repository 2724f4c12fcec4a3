from functools import lru_cache
from typing import Callable, Literal, Optional

import numpy as np
from numpy.polynomial import polynomial as P

from errors import DomainError
from kernels.quadrature import DEFAULT_PANELS, piecewise_simpson
from logging_setup import get_logger
from models.kernel import KernelSpec, KernelValidity

# Get configured logger for this module
logger = get_logger(__name__)

FunctionName = Literal["g", "dg", "g2"]

PSI3_THRESHOLD = 1e-12
_BOUNDARY_TOLERANCE = 1e-14
_CONTINUITY_TOLERANCE = 1e-12


class PiecewiseFunction:
    """
    A function on [0, 1] that is one polynomial per interval between `knots`.

    Coefficients are ascending powers of the global variable x, one row per piece. A smooth
    function is given instead as a callable and has the single piece [0, 1].
    """

    def __init__(
        self,
        knots: np.ndarray,
        coefficients: Optional[np.ndarray] = None,
        smooth: Optional[Callable[[np.ndarray], np.ndarray]] = None,
    ):
        self.knots = np.asarray(knots, dtype=float)
        self.coefficients = coefficients
        self.smooth = smooth

    @property
    def pieces(self) -> int:
        return self.knots.size - 1

    def piece_index(self, points: np.ndarray) -> np.ndarray:
        """Index of the piece holding each point; a knot belongs to the piece on its right."""
        index = np.searchsorted(self.knots, points, side="right") - 1
        return np.clip(index, 0, self.pieces - 1)

    def evaluate(self, points, locate=None) -> np.ndarray:
        """
        Evaluate at `points`, choosing each piece from `locate` (defaults to the points).

        Passing an interior point of the integration piece as `locate` extends the polynomial
        to the piece's end points, which yields the one-sided limits there.
        """
        points = np.asarray(points, dtype=float)
        if self.smooth is not None:
            return self.smooth(points)
        locate = points if locate is None else np.broadcast_to(locate, points.shape)
        index = self.piece_index(locate)
        degree = self.coefficients.shape[1]
        result = np.zeros(points.shape)
        for power in range(degree - 1, -1, -1):
            result = result * points + np.take(self.coefficients[:, power], index)
        return result


def _stack(rows: list[np.ndarray]) -> np.ndarray:
    width = max(row.size for row in rows)
    matrix = np.zeros((len(rows), width))
    for position, row in enumerate(rows):
        matrix[position, : row.size] = row
    return matrix


@lru_cache(maxsize=64)
def kernel_function(spec: KernelSpec, name: FunctionName) -> PiecewiseFunction:
    """g, g' or g^2 of a kernel as a PiecewiseFunction."""
    scale = spec.scale
    if spec.form == "sine":
        omega = 2.0 * np.pi * spec.frequency
        smooth = {
            "g": lambda x: scale * np.sin(omega * x),
            "dg": lambda x: scale * omega * np.cos(omega * x),
            "g2": lambda x: (scale * np.sin(omega * x)) ** 2,
        }[name]
        return PiecewiseFunction(np.array([0.0, 1.0]), smooth=smooth)

    knots, coefficients = spec.polynomial_pieces()
    rows = [scale * np.asarray(piece, dtype=float) for piece in coefficients]
    if name == "dg":
        rows = [P.polyder(row) if row.size > 1 else np.zeros(1) for row in rows]
    elif name == "g2":
        rows = [P.polymul(row, row) for row in rows]
    return PiecewiseFunction(np.asarray(knots, dtype=float), coefficients=_stack(rows))


def _checked_points(x) -> np.ndarray:
    points = np.asarray(x, dtype=float)
    if not np.isfinite(points).all() or (points < 0.0).any() or (points > 1.0).any():
        raise DomainError(f"kernel arguments must lie in [0, 1], got {x!r}")
    return points


def _as_output(values: np.ndarray, x):
    return float(values) if np.ndim(x) == 0 else values


def eval_kernel(spec: KernelSpec, x):
    """
    Evaluate g at x in [0, 1].

    Raises:
        DomainError: If x lies outside [0, 1].
    """
    points = _checked_points(x)
    return _as_output(kernel_function(spec, "g").evaluate(points), x)


def eval_kernel_deriv(spec: KernelSpec, x):
    """
    Evaluate g' at x in [0, 1]; at a knot the right limit is returned (left limit at x = 1).

    Raises:
        DomainError: If x lies outside [0, 1].
    """
    points = _checked_points(x)
    return _as_output(kernel_function(spec, "dg").evaluate(points), x)


def psi_integral(
    spec: KernelSpec, u: FunctionName, v: FunctionName, panels: int = DEFAULT_PANELS
) -> float:
    """int_0^1 u(x) v(x) dx by Simpson on the kernel's pieces."""
    first = kernel_function(spec, u)
    second = kernel_function(spec, v)
    knots = first.knots

    def integrand(points, midpoints):
        return first.evaluate(points, midpoints) * second.evaluate(points, midpoints)

    return float(piecewise_simpson(integrand, knots[:-1], knots[1:], panels))


def validate_kernel(spec: KernelSpec) -> KernelValidity:
    """
    Check g(0) = g(1) = 0, continuity of g at every interior knot and int g^3 != 0.

    Returns a report; nothing is raised for an invalid kernel.
    """
    g = kernel_function(spec, "g")
    tolerance = _BOUNDARY_TOLERANCE * max(1.0, abs(spec.scale))
    boundary = bool(abs(g.evaluate(0.0)) <= tolerance and abs(g.evaluate(1.0)) <= tolerance)

    continuous = True
    for position, knot in enumerate(spec.interior_knots, start=1):
        left = g.evaluate(knot, locate=0.5 * (g.knots[position - 1] + knot))
        right = g.evaluate(knot)
        if abs(left - right) > _CONTINUITY_TOLERANCE * max(1.0, abs(spec.scale)):
            continuous = False

    psi3 = psi_integral(spec, "g", "g2")
    report = KernelValidity(
        boundary_zeros=boundary,
        continuous=continuous,
        psi3_nonzero=abs(psi3) > PSI3_THRESHOLD,
        psi3=psi3,
    )
    if not report.valid:
        logger.warning(f"Kernel {spec.kernel_id} fails: {', '.join(report.failures())}")
    return report
