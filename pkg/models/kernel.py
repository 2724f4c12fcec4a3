from typing import Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator

_MIN_KERNEL_BREAKPOINTS = (0.0, 0.5, 1.0)
_MIN_KERNEL_COEFFICIENTS = ((0.0, 1.0), (1.0, -1.0))


class KernelSpec(BaseModel):
    """
    A pre-averaging weight function g on [0, 1], multiplied by `scale`.

    min:                  g(x) = min(x, 1 - x)
    piecewise_polynomial: on [b_j, b_{j+1}) g(x) = sum_k coefficients[j][k] * x**k (global x)
    sine:                 g(x) = sin(2 pi frequency x)
    """

    model_config = ConfigDict(frozen=True, extra="forbid", allow_inf_nan=False)
    form: Literal["min", "piecewise_polynomial", "sine"] = Field("min")
    breakpoints: tuple[float, ...] = Field(default_factory=tuple)
    coefficients: tuple[tuple[float, ...], ...] = Field(default_factory=tuple)
    scale: float = Field(1.0)
    frequency: int = Field(1, ge=1)
    name: Optional[str] = Field(None)

    @model_validator(mode="after")
    def _pieces_match_breakpoints(self):
        if self.form != "piecewise_polynomial":
            return self
        knots = self.breakpoints
        if len(knots) < 2 or knots[0] != 0.0 or knots[-1] != 1.0:
            raise ValueError("breakpoints must start at 0 and end at 1")
        if any(right <= left for left, right in zip(knots, knots[1:])):
            raise ValueError("breakpoints must be strictly increasing")
        if len(self.coefficients) != len(knots) - 1:
            raise ValueError("one coefficient tuple is needed per piece")
        if any(len(piece) == 0 for piece in self.coefficients):
            raise ValueError("empty coefficient tuple")
        return self

    @property
    def kernel_id(self) -> str:
        if self.name:
            return self.name
        suffix = "" if self.scale == 1.0 else f"*{self.scale:g}"
        return f"{self.form}{suffix}"

    @property
    def is_polynomial(self) -> bool:
        return self.form != "sine"

    def polynomial_pieces(self) -> tuple[tuple[float, ...], tuple[tuple[float, ...], ...]]:
        """Breakpoints and unscaled coefficients of the polynomial forms."""
        if self.form == "min":
            return _MIN_KERNEL_BREAKPOINTS, _MIN_KERNEL_COEFFICIENTS
        if self.form == "piecewise_polynomial":
            return self.breakpoints, self.coefficients
        raise ValueError(f"{self.form} kernel has no polynomial pieces")

    @property
    def interior_knots(self) -> tuple[float, ...]:
        if not self.is_polynomial:
            return ()
        knots, _ = self.polynomial_pieces()
        return tuple(knots[1:-1])


class KernelValidity(BaseModel):
    model_config = ConfigDict(frozen=True)
    boundary_zeros: bool
    continuous: bool
    psi3_nonzero: bool
    psi3: float

    @property
    def valid(self) -> bool:
        return self.boundary_zeros and self.continuous and self.psi3_nonzero

    def failures(self) -> list[str]:
        checks = {
            "g(0) = g(1) = 0": self.boundary_zeros,
            "g continuous at knots": self.continuous,
            "int g^3 != 0": self.psi3_nonzero,
        }
        return [name for name, passed in checks.items() if not passed]


class KernelConstants(BaseModel):
    """
    psi and Phi constants of a weight function.

    `phi3_minus` uses the squared integrand int phi_{g^2,g}(y)^2 dy;
    `phi3_minus_unsquared` keeps int phi_{g^2,g}(y) dy for comparison.
    """

    model_config = ConfigDict(frozen=True)
    kernel_id: str
    psi1: float
    psi2: float
    psi3: float
    phi22: float
    phi12: float
    phi11: float
    phi3_plus: float
    phi3_minus: float
    phi3_minus_unsquared: float
    phi3p_plus: float
    phi3p_minus: float
    phi23_plus: float
    phi23_minus: float
    phi23p_plus: float
    phi23p_minus: float
    quad_panels: int
