from typing import Literal, Optional

from pydantic import BaseModel, ConfigDict, Field

from models.kernel import KernelSpec
from models.model_spec import ModelSpec
from models.noise import NoiseModel
from models.sampling import SamplingScheme


class SimulateConfig(BaseModel):
    """Config of `simulate`: a model, its Euler step and optionally the observation scheme."""

    model_config = ConfigDict(frozen=True, extra="forbid", allow_inf_nan=False)
    version: Literal[1] = Field(1)
    model: ModelSpec = Field(default_factory=ModelSpec)
    euler_step: float = Field(...)
    seed: int = Field(0, ge=0)
    sampling: Optional[SamplingScheme] = None
    delta_n: Optional[float] = Field(None, gt=0.0)


class TimesConfig(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid", allow_inf_nan=False)
    version: Literal[1] = Field(1)
    sampling: SamplingScheme = Field(default_factory=SamplingScheme)
    delta_n: float = Field(..., gt=0.0)
    horizon: float = Field(1.0, gt=0.0)
    seed: int = Field(0, ge=0)


class NoiseConfig(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid", allow_inf_nan=False)
    version: Literal[1] = Field(1)
    noise: NoiseModel = Field(default_factory=NoiseModel)
    horizon: float = Field(1.0, gt=0.0)
    seed: int = Field(0, ge=0)


class LimitsConfig(BaseModel):
    """Config of `limits`: the scheme and noise the exported path was observed under."""

    model_config = ConfigDict(frozen=True, extra="forbid", allow_inf_nan=False)
    version: Literal[1] = Field(1)
    sampling: SamplingScheme = Field(default_factory=SamplingScheme)
    noise: Optional[NoiseModel] = None
    theta: float = Field(1.0, gt=0.0)
    kernel: KernelSpec = Field(default_factory=KernelSpec)
    n_draws: int = Field(1000, ge=1)
    seed: int = Field(0, ge=0)
