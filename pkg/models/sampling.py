from typing import Literal

from pydantic import BaseModel, ConfigDict, Field, model_validator

from models.arrays import FloatArray


class IntensitySpec(BaseModel):
    """
    The positive function G(t, sigma_t) driving the conditional mean spacing Delta_n * G.

    constant:       G = level
    sinusoid:       G = level * (1 + amplitude * sin(2 pi t / T))
    sigma_coupled:  G = level / (1 + coupling * sigma_t^2)
    """

    model_config = ConfigDict(frozen=True, extra="forbid", allow_inf_nan=False)
    kind: Literal["constant", "sinusoid", "sigma_coupled"] = Field("constant")
    level: float = Field(1.0, gt=0.0)
    amplitude: float = Field(0.0, gt=-1.0, lt=1.0)
    coupling: float = Field(0.0, ge=0.0)

    @property
    def is_unit(self) -> bool:
        return self.kind == "constant" and self.level == 1.0

    @property
    def needs_path(self) -> bool:
        return self.kind == "sigma_coupled"


class SamplingScheme(BaseModel):
    """
    Observation-time scheme.

    equidistant: t_i = i * Delta_n (G = 1).
    restricted:  t_p = t_{p-1} + Delta_n * G(t_{p-1}, sigma_{t_{p-1}}) * eps_p, eps i.i.d. with mean 1.
    poisson:     arrivals at rate 1 / Delta_n, i.e. restricted with G = 1 and eps ~ Exp(1).
    """

    model_config = ConfigDict(frozen=True, extra="forbid", allow_inf_nan=False)
    kind: Literal["equidistant", "restricted", "poisson"] = Field("equidistant")
    intensity: IntensitySpec = Field(default_factory=IntensitySpec)
    multipliers: Literal["uniform", "exponential", "degenerate"] = Field("uniform")

    @model_validator(mode="after")
    def _unit_intensity_outside_restricted(self):
        if self.kind != "restricted" and not self.intensity.is_unit:
            raise ValueError(f"{self.kind} sampling has G = 1; intensity must be constant 1")
        return self


class SamplingTimes(BaseModel):
    """
    Observation times t_0 = 0 < t_1 < ... with the intensity G evaluated at each time.

    `n_count` is N_T = max{i : t_i <= horizon} and `mesh` is r_n(horizon).
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)
    times: FloatArray
    horizon: float = Field(..., gt=0.0)
    delta_n: float = Field(..., gt=0.0)
    g_process: FloatArray
    n_count: int = Field(..., ge=0)
    mesh: float = Field(..., ge=0.0)

    @model_validator(mode="after")
    def _ordered_from_zero(self):
        if self.times.ndim != 1 or self.times.size == 0:
            raise ValueError("times must be a non-empty 1-d array")
        if self.times[0] != 0.0:
            raise ValueError("times must start at 0")
        if self.times.size > 1 and not (self.times[1:] > self.times[:-1]).all():
            raise ValueError("times must be strictly increasing")
        if self.g_process.shape != self.times.shape:
            raise ValueError("g_process must have one value per time")
        return self

    @property
    def observed(self):
        """Times t_0, ..., t_N inside [0, horizon]."""
        return self.times[: self.n_count + 1]
