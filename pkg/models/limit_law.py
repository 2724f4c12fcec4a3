from typing import Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from models.arrays import FloatArray
from models.path_record import JumpRecord


class JumpNoiseValues(BaseModel):
    """Noise variance alpha and intensity G just before and at one jump time."""

    model_config = ConfigDict(frozen=True)
    alpha_minus: float = Field(..., ge=0.0)
    alpha_plus: float = Field(..., ge=0.0)
    g_minus: float = Field(...)
    g_plus: float = Field(...)


class NoisyLimitInputs(BaseModel):
    """
    Path functionals entering the continuous part of the pre-averaging covariance.

    sigma4_g:       int sigma^4 G ds
    sigma2_alpha:   int sigma^2 alpha ds
    alpha2_over_g:  int alpha^2 / G ds
    jump_values:    one entry per jump in the ledger, same order
    min_g:          smallest G seen on the path, checked before any division
    """

    model_config = ConfigDict(frozen=True)
    sigma4_g: float
    sigma2_alpha: float
    alpha2_over_g: float
    jump_values: tuple[JumpNoiseValues, ...] = Field(default_factory=tuple)
    min_g: float = Field(1.0)


class LimitLawParams(BaseModel):
    model_config = ConfigDict(frozen=True)
    iq: float = Field(..., ge=0.0)
    qv: float = Field(..., ge=0.0)
    abs_cubic_sigma: float = Field(0.0, ge=0.0)
    cubic_jump_sum: float = Field(0.0)
    jumps: tuple[JumpRecord, ...] = Field(default_factory=tuple)
    noisy: Optional[NoisyLimitInputs] = None

    @model_validator(mode="after")
    def _jump_values_align(self):
        if self.noisy is not None and self.noisy.jump_values:
            if len(self.noisy.jump_values) != len(self.jumps):
                raise ValueError("noisy jump values must align with the jump ledger")
        return self

    @property
    def jump_sizes(self) -> np.ndarray:
        return np.array([jump.size for jump in self.jumps], dtype=float)

    @property
    def sigma_minus(self) -> np.ndarray:
        return np.array([jump.sigma_minus for jump in self.jumps], dtype=float)

    @property
    def sigma_plus(self) -> np.ndarray:
        return np.array([jump.sigma_plus for jump in self.jumps], dtype=float)


class AuxiliaryDraws(BaseModel):
    """
    Stored Gaussian and uniform variables behind a batch of limit draws.

    Arrays have shape (n_draws,) for u0 and (n_draws, n_jumps) for the jump variables.
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)
    u0: FloatArray
    kappa: FloatArray
    u: FloatArray
    u_prime: FloatArray


class LimitDraws(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)
    continuous: FloatArray
    jump: FloatArray
    auxiliary: AuxiliaryDraws


class GammaMatrix(BaseModel):
    """2x2 covariance (gamma_c + gbar11, gbar12; gbar12, gbar22) of (PRV, PCV)."""

    model_config = ConfigDict(frozen=True)
    gamma_c: float
    gbar11: float
    gbar12: float
    gbar22: float

    def matrix(self) -> np.ndarray:
        return np.array(
            [[self.gamma_c + self.gbar11, self.gbar12], [self.gbar12, self.gbar22]],
            dtype=float,
        )

    @property
    def min_eigenvalue(self) -> float:
        return float(np.linalg.eigvalsh(self.matrix())[0])


class NoisySkewVariance(BaseModel):
    model_config = ConfigDict(frozen=True)
    value: float
    d1: float
    d2: float
    degenerate: bool


class CounterexampleTerm(BaseModel):
    model_config = ConfigDict(frozen=True)
    n: int
    delta_n: float
    c_n: float
