from pydantic import BaseModel, ConfigDict, Field, model_validator

from models.arrays import FloatArray


class JumpRecord(BaseModel):
    model_config = ConfigDict(frozen=True)
    time: float = Field(...)
    size: float = Field(...)
    sigma_minus: float = Field(...)
    sigma_plus: float = Field(...)


class PathOracles(BaseModel):
    """Exact functionals of one simulated realization, computed on its own grid."""

    model_config = ConfigDict(frozen=True)
    integrated_variance: float = Field(...)
    quadratic_variation: float = Field(...)
    integrated_quarticity: float = Field(...)
    squared_jump_sum: float = Field(...)
    cubic_jump_sum: float = Field(...)
    quartic_jump_sum: float = Field(...)
    abs_cubic_sigma_integral: float = Field(...)


class PathRecord(BaseModel):
    """
    A simulated path on a fine grid 0 = s_0 < ... < s_M = T.

    `x` is the latent log-price, `xc` the continuous martingale part int sigma dB
    (starting at 0) and `sigma` the spot volatility used on each Euler step.
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)
    grid: FloatArray
    x: FloatArray
    xc: FloatArray
    sigma: FloatArray
    jumps: tuple[JumpRecord, ...] = Field(default_factory=tuple)
    oracles: PathOracles

    @model_validator(mode="after")
    def _aligned(self):
        size = self.grid.size
        if size < 2:
            raise ValueError("a path needs at least two grid points")
        if any(array.shape != (size,) for array in (self.x, self.xc, self.sigma)):
            raise ValueError("x, xc and sigma must have one value per grid point")
        if not (self.grid[1:] > self.grid[:-1]).all():
            raise ValueError("grid must be strictly increasing")
        return self

    @property
    def horizon(self) -> float:
        return float(self.grid[-1])
