from typing import Literal

from pydantic import BaseModel, ConfigDict, Field, model_validator


class DriftModel(BaseModel):
    """Drift rule b = level + sigma2_loading * sigma^2 (per unit time)."""

    model_config = ConfigDict(frozen=True, extra="forbid", allow_inf_nan=False)
    level: float = Field(0.0)
    sigma2_loading: float = Field(0.0)


class VolatilityModel(BaseModel):
    """
    Constant sigma, or CIR-type variance v = sigma^2 with full truncation.

    For kind="cir", `sigma` is the initial volatility sigma_0.
    """

    model_config = ConfigDict(frozen=True, extra="forbid", allow_inf_nan=False)
    kind: Literal["constant", "cir"] = Field("constant")
    sigma: float = Field(0.3, ge=0.0)
    mean_reversion: float = Field(0.0, ge=0.0)
    long_run_variance: float = Field(0.0, ge=0.0)
    vol_of_vol: float = Field(0.0, ge=0.0)
    leverage: float = Field(0.0, ge=-1.0, le=1.0)

    @model_validator(mode="after")
    def _constant_has_no_vol_of_vol(self):
        if self.kind == "constant" and self.vol_of_vol != 0.0:
            raise ValueError("constant volatility requires vol_of_vol = 0")
        return self

    @property
    def satisfies_feller(self) -> bool:
        return 2.0 * self.mean_reversion * self.long_run_variance >= self.vol_of_vol**2


class FixedJump(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid", allow_inf_nan=False)
    time: float = Field(..., gt=0.0)
    size: float = Field(...)


class JumpModel(BaseModel):
    """
    Compound Poisson jumps plus optional deterministic jumps.

    size_distribution:
        point_mass: every jump equals `size`.
        two_sided_exponential: |jump| ~ Exp(mean=`scale`), positive with probability `up_probability`.
        gaussian: N(`size`, `scale`^2).
    """

    model_config = ConfigDict(frozen=True, extra="forbid", allow_inf_nan=False)
    intensity: float = Field(0.0, ge=0.0)
    size_distribution: Literal["point_mass", "two_sided_exponential", "gaussian"] = Field(
        "point_mass"
    )
    size: float = Field(0.0)
    scale: float = Field(0.0, ge=0.0)
    up_probability: float = Field(0.5, ge=0.0, le=1.0)
    fixed_jumps: tuple[FixedJump, ...] = Field(default_factory=tuple)


class ModelSpec(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid", allow_inf_nan=False)
    x0: float = Field(0.0)
    drift: DriftModel = Field(default_factory=DriftModel)
    volatility: VolatilityModel = Field(default_factory=VolatilityModel)
    jumps: JumpModel = Field(default_factory=JumpModel)
    horizon: float = Field(1.0, gt=0.0)

    @model_validator(mode="after")
    def _fixed_jumps_inside_horizon(self):
        for jump in self.jumps.fixed_jumps:
            if jump.time > self.horizon:
                raise ValueError(
                    f"fixed jump at t={jump.time} lies beyond the horizon {self.horizon}"
                )
        return self
