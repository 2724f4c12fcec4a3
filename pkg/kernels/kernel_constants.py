from functools import lru_cache
from typing import Optional

import numpy as np

from errors import DomainError, KernelValidityError
from kernels.kernel_functions import FunctionName, kernel_function, psi_integral, validate_kernel
from kernels.quadrature import DEFAULT_PANELS, integrate_pieces, piece_nodes, piecewise_simpson
from logging_setup import get_logger
from models.kernel import KernelConstants, KernelSpec

# Get configured logger for this module
logger = get_logger(__name__)

MIN_PANELS = 64
# Outer nodes evaluated per vectorized batch
_CHUNK = 256


def _check_panels(panels: int, minimum: int) -> None:
    if panels < minimum or panels % 2:
        raise DomainError(f"panels must be even and >= {minimum}, got {panels}")


def _phi_values(spec: KernelSpec, u: FunctionName, v: FunctionName, y: np.ndarray, panels: int) -> np.ndarray:
    """phi_{u,v}(y) = int_y^1 u(x - y) v(x) dx for every y, split at all knots of u(. - y) and v."""
    first = kernel_function(spec, u)
    second = kernel_function(spec, v)
    values = np.empty(y.size)
    for begin in range(0, y.size, _CHUNK):
        rows = y[begin : begin + _CHUNK, None]
        candidates = np.concatenate(
            [rows + first.knots[None, :], np.broadcast_to(second.knots, (rows.shape[0], second.knots.size))],
            axis=1,
        )
        cuts = np.sort(np.clip(candidates, rows, 1.0), axis=1)
        shift = rows[..., None]

        def integrand(points, midpoints):
            return first.evaluate(points - shift, midpoints - shift) * second.evaluate(points, midpoints)

        values[begin : begin + _CHUNK] = piecewise_simpson(integrand, cuts[:, :-1], cuts[:, 1:], panels)
    return values


def phi_uv(spec: KernelSpec, u: FunctionName, v: FunctionName, y, panels: int = DEFAULT_PANELS):
    """
    phi_{u,v}(y) = int_y^1 u(x - y) v(x) dx with u, v drawn from g, g' and g^2.

    Composite Simpson over [y, 1], with panels split at every point where u(. - y) or v has a knot.

    Parameters:
        spec (KernelSpec): The weight function.
        u (str): "g", "dg" or "g2".
        v (str): "g", "dg" or "g2".
        y (float or np.ndarray): Points in [0, 1].
        panels (int): Even panel budget, at least 2.

    Returns:
        float or np.ndarray: phi_{u,v}(y), shaped like y.

    Raises:
        DomainError: If y leaves [0, 1] or panels is odd or below 2.
    """
    _check_panels(panels, 2)
    points = np.asarray(y, dtype=float)
    if not np.isfinite(points).all() or (points < 0.0).any() or (points > 1.0).any():
        raise DomainError(f"y must lie in [0, 1], got {y!r}")
    values = _phi_values(spec, u, v, points.reshape(-1), panels).reshape(points.shape)
    return float(values) if points.ndim == 0 else values


def outer_knots(spec: KernelSpec) -> np.ndarray:
    """Points y where some phi_{u,v} changes polynomial piece: differences of kernel knots in [0, 1]."""
    knots = kernel_function(spec, "g").knots
    differences = (knots[None, :] - knots[:, None]).reshape(-1)
    return np.unique(np.concatenate([[0.0, 1.0], differences[(differences >= 0.0) & (differences <= 1.0)]]))


@lru_cache(maxsize=32)
def kernel_constants(spec: KernelSpec, panels: int = DEFAULT_PANELS) -> KernelConstants:
    """
    Compute psi_1, psi_2, psi_3 and every Phi constant of a kernel by nested Simpson quadrature.

    The outer integrals over y are split at the differences of kernel knots, where the
    phi functions change polynomial piece; the inner integrals are split as in phi_uv.
    Results are cached per (kernel, panels).

    Parameters:
        spec (KernelSpec): The weight function.
        panels (int): Even panel budget (>= 64) for each inner and outer integral.

    Returns:
        KernelConstants: All constants, with the panel count used.

    Raises:
        DomainError: If panels is odd or below 64.
        KernelValidityError: If g(0) or g(1) is nonzero, g is discontinuous or |psi_3| <= 1e-12.
    """
    _check_panels(panels, MIN_PANELS)
    validity = validate_kernel(spec)
    if not validity.valid:
        logger.error(f"Kernel {spec.kernel_id} is not a valid weight function: {validity.failures()}")
        raise KernelValidityError(f"kernel {spec.kernel_id} fails: {', '.join(validity.failures())}")

    knots = outer_knots(spec)
    reference, lengths, points = piece_nodes(knots[:-1], knots[1:], panels)
    logger.debug(f"Outer quadrature over {lengths.size} pieces, {points.size} nodes for {spec.kernel_id}")

    pairs = {
        "gg": ("g", "g"),
        "dd": ("dg", "dg"),
        "g_g2": ("g", "g2"),
        "g2_g": ("g2", "g"),
        "d_g2": ("dg", "g2"),
        "g2_d": ("g2", "dg"),
        "d_g": ("dg", "g"),
        "g_d": ("g", "dg"),
    }
    phi = {
        name: _phi_values(spec, u, v, points.reshape(-1), panels).reshape(points.shape)
        for name, (u, v) in pairs.items()
    }

    def integrate(first: str, second: Optional[str] = None) -> float:
        values = phi[first] if second is None else phi[first] * phi[second]
        return float(integrate_pieces(values, reference, lengths))

    constants = KernelConstants(
        kernel_id=spec.kernel_id,
        psi1=psi_integral(spec, "dg", "dg", panels),
        psi2=psi_integral(spec, "g", "g", panels),
        psi3=psi_integral(spec, "g", "g2", panels),
        phi22=integrate("gg", "gg"),
        phi12=integrate("gg", "dd"),
        phi11=integrate("dd", "dd"),
        phi3_plus=integrate("g_g2", "g_g2"),
        phi3_minus=integrate("g2_g", "g2_g"),
        phi3_minus_unsquared=integrate("g2_g"),
        phi3p_plus=integrate("d_g2", "d_g2"),
        phi3p_minus=integrate("g2_d", "g2_d"),
        phi23_plus=integrate("gg", "g_g2"),
        phi23_minus=integrate("gg", "g2_g"),
        phi23p_plus=integrate("d_g", "d_g2"),
        phi23p_minus=integrate("g_d", "g2_d"),
        quad_panels=panels,
    )
    logger.info(
        f"Kernel constants for {spec.kernel_id} with {panels} panels: "
        f"psi=({constants.psi1:.6g}, {constants.psi2:.6g}, {constants.psi3:.6g})"
    )
    return constants
