"""
The oscillating sequence behind the failing CLT for g_a(x) = |x|^3 sin(2a log|x|).

With A = int_0^inf x^3 cos(2a log x) N(x) dx and B = int_0^inf x^3 sin(2a log x) N(x) dx
(N the standard normal density), the normalized mean of V(X^c, g_a) behaves like
c_n = sin(a log Delta_n) A + cos(a log Delta_n) B, which equals (-1)^n B along
Delta_n = exp(-n pi / a).
"""

import math
from typing import Sequence

import numpy as np
from scipy.integrate import simpson
from scipy.special import gamma as gamma_function
from scipy.stats import norm

from errors import DegenerateCounterexampleError, DomainError
from logging_setup import get_logger
from models.limit_law import CounterexampleTerm

# Get configured logger for this module
logger = get_logger(__name__)

DEFAULT_COUNTEREXAMPLE_PANELS = 20000
B_THRESHOLD = 1e-10
CANDIDATE_PARAMETERS = (0.5, 1.0, 2.0, 4.0)
# Integration range in x; the density makes both tails negligible
_LOWER = 1e-8
_UPPER = 12.0


def _check_parameter(a: float) -> None:
    if not math.isfinite(a) or a == 0.0:
        raise DomainError(f"a must be a nonzero real, got {a}")


def counterexample_integrals(a: float, panels: int = DEFAULT_COUNTEREXAMPLE_PANELS) -> tuple[float, float]:
    """
    A and B by composite Simpson in y = log x over [log 1e-8, log 12].

    Raises:
        DomainError: If a is zero or panels is not an even count of at least 2.
    """
    _check_parameter(a)
    if panels < 2 or panels % 2:
        raise DomainError(f"panels must be even and at least 2, got {panels}")
    y = np.linspace(math.log(_LOWER), math.log(_UPPER), panels + 1)
    x = np.exp(y)
    # dx = x dy
    weight = x**4 * norm.pdf(x)
    a_value = float(simpson(weight * np.cos(2.0 * a * y), x=y))
    b_value = float(simpson(weight * np.sin(2.0 * a * y), x=y))
    return a_value, b_value


def counterexample_closed_form(a: float) -> tuple[float, float]:
    """A + iB = 2^{1+ia} Gamma(2+ia) / sqrt(2 pi), the Mellin transform of the normal density."""
    value = 2.0 ** complex(1.0, a) * gamma_function(complex(2.0, a)) / math.sqrt(2.0 * math.pi)
    return float(value.real), float(value.imag)


def counterexample_term(a: float, delta_n: float, a_value: float, b_value: float) -> float:
    """c = sin(a log Delta_n) A + cos(a log Delta_n) B for any Delta_n > 0."""
    _check_parameter(a)
    if not delta_n > 0.0:
        raise DomainError(f"delta_n must be positive, got {delta_n}")
    phase = a * math.log(delta_n)
    return math.sin(phase) * a_value + math.cos(phase) * b_value


def counterexample_sequence(
    a: float, n_max: int, panels: int = DEFAULT_COUNTEREXAMPLE_PANELS
) -> list[CounterexampleTerm]:
    """
    c_n for n = 1..n_max along Delta_n = exp(-n pi / a).

    Parameters:
        a (float): Nonzero parameter of g_a.
        n_max (int): Last index, at least 1.
        panels (int): Simpson panels for A and B.

    Returns:
        list[CounterexampleTerm]: (n, Delta_n, c_n), alternating in sign.

    Raises:
        DomainError: If a is zero or n_max is below 1.
        DegenerateCounterexampleError: If |B| < 1e-10, in which case c_n does not oscillate.
    """
    if n_max < 1:
        raise DomainError(f"n_max must be at least 1, got {n_max}")
    a_value, b_value = counterexample_integrals(a, panels)
    if abs(b_value) < B_THRESHOLD:
        logger.error(f"Counterexample degenerate for a={a}: B={b_value!r}")
        raise DegenerateCounterexampleError(a, b_value)
    terms = []
    for n in range(1, n_max + 1):
        delta_n = math.exp(-n * math.pi / a)
        terms.append(CounterexampleTerm(n=n, delta_n=delta_n, c_n=counterexample_term(a, delta_n, a_value, b_value)))
    logger.info(f"Counterexample a={a}: A={a_value:.12g}, B={b_value:.12g}, {n_max} terms")
    return terms


def find_counterexample_parameter(
    candidates: Sequence[float] = CANDIDATE_PARAMETERS, panels: int = DEFAULT_COUNTEREXAMPLE_PANELS
) -> float:
    """
    First candidate a whose sine integral B is not negligible.

    Raises:
        DegenerateCounterexampleError: If every candidate gives |B| < 1e-10.
    """
    b_value = 0.0
    a = float("nan")
    for a in candidates:
        _, b_value = counterexample_integrals(a, panels)
        logger.debug(f"Candidate a={a}: B={b_value!r}")
        if abs(b_value) >= B_THRESHOLD:
            return a
    raise DegenerateCounterexampleError(a, b_value)
