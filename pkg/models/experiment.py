from typing import Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator

from models.estimates import EstimateSet
from models.kernel import KernelSpec
from models.model_spec import ModelSpec
from models.noise import NoiseModel
from models.sampling import SamplingScheme

CheckName = Literal["consistency", "rate", "clt_raw", "clt_noisy", "coverage", "counterexample"]

DISTRIBUTIONAL_CHECKS = frozenset({"clt_raw", "clt_noisy", "coverage"})
NOISY_CHECKS = frozenset({"clt_noisy", "coverage"})


class Scenario(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid", allow_inf_nan=False)
    model: ModelSpec = Field(default_factory=ModelSpec)
    sampling: SamplingScheme = Field(default_factory=SamplingScheme)
    noise: Optional[NoiseModel] = None


class Thresholds(BaseModel):
    """Pass/fail limits of the Monte Carlo checks, calibrated empirically."""

    model_config = ConfigDict(frozen=True, extra="forbid", allow_inf_nan=False)
    ks_max: float = Field(0.05, gt=0.0, le=1.0)
    variance_rel_tol: float = Field(0.15, gt=0.0)
    mean_se_multiple: float = Field(3.0, gt=0.0)
    coverage_level: float = Field(0.95, gt=0.0, lt=1.0)
    coverage_low: float = Field(0.92, ge=0.0, le=1.0)
    coverage_high: float = Field(0.98, ge=0.0, le=1.0)
    rate_low: float = Field(0.4)
    rate_high: float = Field(0.6)
    min_distributional_reps: int = Field(100, ge=1)


class CounterexampleConfig(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid", allow_inf_nan=False)
    a: float = Field(1.0)
    n_values: tuple[int, int] = Field((2, 3))
    n_max: int = Field(20, ge=2)
    n_reps: int = Field(5000, ge=1)
    sigma: float = Field(1.0, gt=0.0)
    horizon: float = Field(1.0, gt=0.0)
    panels: int = Field(20000, ge=2)

    @model_validator(mode="after")
    def _consecutive_n(self):
        first, second = self.n_values
        if first < 1 or second != first + 1:
            raise ValueError("n_values must be two consecutive positive integers")
        if self.a == 0.0:
            raise ValueError("a must be nonzero")
        return self


class ExperimentConfig(BaseModel):
    """
    A Monte Carlo experiment over a grid of sampling steps.

    `delta_grid` runs from coarse to fine. Replication r on grid index j draws every random
    component from the stream keyed by (seed, j, r). `n_reps = 0` is a dry run.
    `euler_step_fraction` sets the Euler step to max(fraction * Delta_n, 1e-5 * T).
    """

    model_config = ConfigDict(frozen=True, extra="forbid", allow_inf_nan=False)
    version: Literal[1] = Field(1)
    scenario: Scenario = Field(default_factory=Scenario)
    delta_grid: tuple[float, ...] = Field(..., min_length=1)
    theta: float = Field(1.0, gt=0.0)
    kernel: KernelSpec = Field(default_factory=KernelSpec)
    n_reps: int = Field(..., ge=0)
    seed: int = Field(0, ge=0)
    checks: tuple[CheckName, ...] = Field(default_factory=tuple)
    euler_step_fraction: float = Field(0.1, gt=0.0, le=1.0)
    workers: Optional[int] = Field(None, ge=1)
    thresholds: Thresholds = Field(default_factory=Thresholds)
    counterexample: CounterexampleConfig = Field(default_factory=CounterexampleConfig)

    @model_validator(mode="after")
    def _grid_and_replications(self):
        grid = self.delta_grid
        if any(step <= 0.0 for step in grid):
            raise ValueError("delta_grid entries must be positive")
        if any(finer >= coarser for coarser, finer in zip(grid, grid[1:])):
            raise ValueError("delta_grid must be sorted strictly descending")
        if len(set(self.checks)) != len(self.checks):
            raise ValueError("checks must not repeat")
        noisy = sorted(NOISY_CHECKS.intersection(self.checks))
        if noisy and self.scenario.noise is None:
            raise ValueError(f"checks {noisy} need a noise model in the scenario")
        minimum = self.thresholds.min_distributional_reps
        if self.n_reps and DISTRIBUTIONAL_CHECKS.intersection(self.checks) and self.n_reps < minimum:
            raise ValueError(f"distributional checks need n_reps >= {minimum}")
        return self


class ReplicationResult(BaseModel):
    """
    One (Delta_n, replication) cell of an experiment.

    `errors` are the rate-normalized errors, `oracle_sd` the conditional standard deviation
    of their limit, `limit_draws` matched draws from the limit law of the same replication.
    """

    model_config = ConfigDict(frozen=True)
    delta_index: int
    delta_n: float
    replication: int
    estimates: Optional[EstimateSet] = None
    qv: Optional[float] = None
    cubic_jump_sum: Optional[float] = None
    estimand: Optional[float] = None
    errors: dict[str, float] = Field(default_factory=dict)
    oracle_sd: dict[str, float] = Field(default_factory=dict)
    limit_draws: dict[str, float] = Field(default_factory=dict)
    failure: Optional[str] = None

    @property
    def succeeded(self) -> bool:
        return self.failure is None


class DeltaSummary(BaseModel):
    model_config = ConfigDict(frozen=True)
    delta_index: int
    delta_n: float
    k_n: Optional[int] = None
    n_success: int
    n_failed: int
    failure_counts: dict[str, int] = Field(default_factory=dict)
    degenerate_counts: dict[str, int] = Field(default_factory=dict)
    rmse: dict[str, float] = Field(default_factory=dict)
    mean_error: dict[str, float] = Field(default_factory=dict)
    var_error: dict[str, float] = Field(default_factory=dict)
    limit_variance: dict[str, float] = Field(default_factory=dict)


class CheckOutcome(BaseModel):
    model_config = ConfigDict(frozen=True)
    name: str
    passed: bool
    value: Optional[float] = None
    threshold: str = ""
    detail: str = ""


class CounterexampleMonteCarlo(BaseModel):
    """Monte Carlo mean of Delta_n^{-1/2} sum g_a(increment) next to its limit 2 T c_n."""

    model_config = ConfigDict(frozen=True)
    n: int
    delta_n: float
    c_n: float
    mean: float
    standard_error: float
    n_reps: int


class ExperimentReport(BaseModel):
    model_config = ConfigDict(frozen=True)
    config: ExperimentConfig
    dry_run: bool = Field(False)
    replications: tuple[ReplicationResult, ...] = Field(default_factory=tuple)
    summaries: tuple[DeltaSummary, ...] = Field(default_factory=tuple)
    rate_slopes: dict[str, float] = Field(default_factory=dict)
    ks_distances: dict[str, float] = Field(default_factory=dict)
    coverage_rates: dict[str, float] = Field(default_factory=dict)
    counterexample: tuple[CounterexampleMonteCarlo, ...] = Field(default_factory=tuple)
    checks: tuple[CheckOutcome, ...] = Field(default_factory=tuple)

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)
