from typing import Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator

from models.arrays import FloatArray
from models.sampling import SamplingTimes


class ObservedSeries(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)
    times: SamplingTimes
    values: FloatArray
    is_noisy: bool = Field(False)

    @model_validator(mode="after")
    def _lengths_match(self):
        if self.values.shape != (self.times.n_count + 1,) and self.values.shape != self.times.times.shape:
            raise ValueError(
                f"{self.values.size} values do not match {self.times.times.size} observation times"
            )
        return self

    @property
    def increments(self):
        """Increments Y_{t_i} - Y_{t_{i-1}} for i = 1..N_T (times beyond the horizon are dropped)."""
        observed = self.values[: self.times.n_count + 1]
        return observed[1:] - observed[:-1]


class Tuning(BaseModel):
    model_config = ConfigDict(frozen=True)
    delta_n: float
    theta: Optional[float] = None
    k_n: Optional[int] = None
    kernel_id: Optional[str] = None


class RealizedSkewness(BaseModel):
    """
    raw:             floor(T/Delta_n) * sum d^3 / (sum d^2)^{3/2}
    scaled:          raw / floor(T/Delta_n)
    raw_event_count: N_T * sum d^3 / (sum d^2)^{3/2}, the irregular-time variant
    """

    model_config = ConfigDict(frozen=True)
    raw: float
    scaled: float
    raw_event_count: float


class EstimateSet(BaseModel):
    model_config = ConfigDict(frozen=True)
    rv: float
    cubic_pv: float
    abs_cubic_pv: float
    rdskew_raw: Optional[float] = None
    rdskew_scaled: Optional[float] = None
    rdskew_raw_event_count: Optional[float] = None
    prv: Optional[float] = None
    pcv: Optional[float] = None
    noisy_skew: Optional[float] = None
    failures: tuple[str, ...] = Field(default_factory=tuple)
    tuning: Tuning
