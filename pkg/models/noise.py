from typing import Literal

from pydantic import BaseModel, ConfigDict, Field


class NoiseModel(BaseModel):
    """
    Microstructure noise eps with E[eps] = 0 and conditional variance alpha_t.

    family:
        gaussian:  eps ~ N(0, alpha_t)
        two_point: eps = +-sqrt(alpha_t) with probability 1/2 each
    variance:
        constant:      alpha = level
        sinusoid:      alpha = level * (1 + amplitude * sin(2 pi t / T))
        sigma_coupled: alpha = level * sigma_t^2
    """

    model_config = ConfigDict(frozen=True, extra="forbid", allow_inf_nan=False)
    family: Literal["gaussian", "two_point"] = Field("gaussian")
    variance: Literal["constant", "sinusoid", "sigma_coupled"] = Field("constant")
    level: float = Field(0.0)
    amplitude: float = Field(0.0)

    @property
    def needs_path(self) -> bool:
        return self.variance == "sigma_coupled"
