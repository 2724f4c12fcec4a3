"""
Monte Carlo experiments over a grid of sampling steps.

Each (Delta_n, replication) cell simulates a path, observes it, estimates, and normalizes the
estimation errors by their convergence rate (Delta_n^{1/2} raw, Delta_n^{1/4} pre-averaged).
Cells are independent: cell (j, r) draws every random component from streams keyed by
(seed, j, r), so results do not depend on the worker count or the order of execution.
"""

import math
from collections import Counter
from itertools import repeat
from multiprocessing import Pool
from typing import Optional

import numpy as np

from errors import DegenerateDenominatorError, DomainError, SkewLabError
from estimators.estimate_set import estimate_all
from estimators.power_variation import g_a
from estimators.preaverage import choose_kn
from harness.statistics import coverage, ks_distance, rate_regression
from kernels.kernel_constants import kernel_constants
from limitlaw.counterexample import counterexample_sequence
from limitlaw.gamma import gamma_matrix, noisy_skew_variance
from limitlaw.oracles import (
    cubic_limit_variance,
    limit_law_params,
    oracle_targets,
    rv_limit_variance,
    skew_limit_variance,
)
from limitlaw.samplers import abs_cubic_limit_sample, skew_limit_sample, thm2_limit_sample
from logging_setup import get_logger
from models.estimates import ObservedSeries
from models.experiment import (
    CheckOutcome,
    CounterexampleConfig,
    CounterexampleMonteCarlo,
    DeltaSummary,
    ExperimentConfig,
    ExperimentReport,
    ReplicationResult,
)
from models.kernel import KernelConstants
from models.model_spec import ModelSpec, VolatilityModel
from simkit.apply_noise import apply_noise
from simkit.generate_times import equidistant_times
from simkit.observe import simulate_observed
from simkit.rng import StreamLabel, stream
from simkit.sample_process import sample_process, sigma_at
from simkit.simulate_path import simulate_path

# Get configured logger for this module
logger = get_logger(__name__)

# Convergence exponent of every normalized error.
# "cubic_centered" also removes the realized continuous cube and has no limit draw.
RATES = {
    "rv": 0.5,
    "cubic": 0.5,
    "cubic_centered": 0.5,
    "abs_cubic": 0.5,
    "skew": 0.5,
    "prv": 0.25,
    "pcv": 0.25,
    "noisy_skew": 0.25,
}
MIN_EULER_FRACTION_OF_HORIZON = 1e-5
ALTERNATION_TOLERANCE = 1e-9


def euler_step_for(config: ExperimentConfig, delta_n: float) -> float:
    """max(fraction * Delta_n, 1e-5 * T), capped at T."""
    horizon = config.scenario.model.horizon
    return min(horizon, max(config.euler_step_fraction * delta_n, MIN_EULER_FRACTION_OF_HORIZON * horizon))


def _failure_label(exc: SkewLabError) -> str:
    if isinstance(exc, DegenerateDenominatorError):
        return f"degenerate_{exc.quantity}"
    return type(exc).__name__


def _observe(config: ExperimentConfig, delta_n: float, key: tuple[int, int]):
    """Simulate and observe one cell; returns the path, the times and the observed series."""
    scenario = config.scenario
    noise = scenario.noise
    path, times = simulate_observed(
        scenario.model, scenario.sampling, delta_n, euler_step_for(config, delta_n), config.seed, key
    )
    values = sample_process(path, times)
    if noise is not None:
        values = apply_noise(
            values, times, noise, config.seed, sigma=sigma_at(path, times.observed), key=key
        )
    return path, times, ObservedSeries(times=times, values=values, is_noisy=noise is not None)


def run_replication(
    config: ExperimentConfig,
    delta_index: int,
    replication: int,
    constants: Optional[KernelConstants] = None,
) -> ReplicationResult:
    """
    Run one (Delta_n, replication) cell.

    A cell whose simulation or estimation raises a package error is returned with `failure`
    set to the error label instead of aborting the experiment.

    Parameters:
        config (ExperimentConfig): The experiment.
        delta_index (int): Index j into `delta_grid`.
        replication (int): Replication number r.
        constants (KernelConstants, optional): Constants of `config.kernel`; computed when missing.

    Returns:
        ReplicationResult: Estimates, normalized errors, oracle SDs and matched limit draws.
    """
    delta_n = config.delta_grid[delta_index]
    key = (delta_index, replication)
    seed = config.seed
    scenario = config.scenario
    constants = constants or kernel_constants(config.kernel)
    try:
        path, times, series = _observe(config, delta_n, key)
        horizon = scenario.model.horizon
        estimates = estimate_all(series, delta_n, horizon, config.theta, config.kernel, constants)
        qv, cubic, estimand = oracle_targets(path)
        params = limit_law_params(path, scenario.sampling, scenario.noise)

        observed_index = np.searchsorted(path.grid, times.observed)
        continuous_cubic = float(np.sum(np.diff(path.xc[observed_index]) ** 3))
        abs_cubic_jumps = float(np.sum(np.abs(params.jump_sizes) ** 3))
        raw_scale = math.sqrt(delta_n)
        noisy_scale = delta_n**0.25

        errors = {
            "rv": (estimates.rv - qv) / raw_scale,
            "cubic": (estimates.cubic_pv - cubic) / raw_scale,
            "cubic_centered": (estimates.cubic_pv - continuous_cubic - cubic) / raw_scale,
            "abs_cubic": (estimates.abs_cubic_pv - abs_cubic_jumps) / raw_scale,
        }
        if estimates.rdskew_scaled is not None:
            errors["skew"] = (estimates.rdskew_scaled - estimand) / raw_scale
        oracle_sd = {
            "rv": math.sqrt(rv_limit_variance(params)),
            "cubic": math.sqrt(cubic_limit_variance(params)),
            "skew": math.sqrt(skew_limit_variance(params)),
        }
        joint = thm2_limit_sample(params, "cube", 1, seed, key)
        limit_draws = {
            "rv": float(joint.continuous[0]),
            "cubic": float(joint.jump[0]),
            "abs_cubic": float(abs_cubic_limit_sample(params, 1, seed, key)[0]),
            "skew": float(skew_limit_sample(params, 1, seed, key)[0]),
        }

        if estimates.prv is not None:
            errors["prv"] = (estimates.prv - qv) / noisy_scale
            errors["pcv"] = (estimates.pcv - cubic) / noisy_scale
            if estimates.noisy_skew is not None:
                errors["noisy_skew"] = (estimates.noisy_skew - estimand) / noisy_scale
            gamma = gamma_matrix(params, config.theta, constants)
            variance = noisy_skew_variance(gamma, qv, cubic)
            oracle_sd["prv"] = math.sqrt(max(gamma.gamma_c + gamma.gbar11, 0.0))
            oracle_sd["pcv"] = math.sqrt(max(gamma.gbar22, 0.0))
            if not variance.degenerate:
                oracle_sd["noisy_skew"] = math.sqrt(variance.value)
            rng = stream(seed, StreamLabel.LIMIT, *key, 1)
            prv_draw, pcv_draw = rng.multivariate_normal(np.zeros(2), gamma.matrix(), method="eigh")
            limit_draws["prv"] = float(prv_draw)
            limit_draws["pcv"] = float(pcv_draw)
            limit_draws["noisy_skew"] = float(variance.d1 * prv_draw + variance.d2 * pcv_draw)

        return ReplicationResult(
            delta_index=delta_index,
            delta_n=delta_n,
            replication=replication,
            estimates=estimates,
            qv=qv,
            cubic_jump_sum=cubic,
            estimand=estimand,
            errors=errors,
            oracle_sd=oracle_sd,
            limit_draws=limit_draws,
        )
    except SkewLabError as exc:
        label = _failure_label(exc)
        logger.warning(f"Replication {replication} at delta_n={delta_n} failed: {label} ({exc})")
        return ReplicationResult(delta_index=delta_index, delta_n=delta_n, replication=replication, failure=label)


def _column(results: list[ReplicationResult], field: str, name: str) -> np.ndarray:
    return np.array([getattr(result, field)[name] for result in results if name in getattr(result, field)])


def summarize(delta_index: int, delta_n: float, results: list[ReplicationResult], k_n: Optional[int]) -> DeltaSummary:
    """
    Per-step summary. `rmse` is on the raw scale (the normalized RMSE times Delta_n^rate);
    `mean_error` and `var_error` are on the normalized scale; `limit_variance` averages the
    conditional limit variances over replications.
    """
    succeeded = [result for result in results if result.succeeded]
    rmse, mean_error, var_error, limit_variance = {}, {}, {}, {}
    for name, rate in RATES.items():
        values = _column(succeeded, "errors", name)
        if values.size:
            rmse[name] = float(np.sqrt(np.mean(values**2))) * delta_n**rate
            mean_error[name] = float(np.mean(values))
            var_error[name] = float(np.var(values, ddof=1)) if values.size > 1 else 0.0
        variances = _column(succeeded, "oracle_sd", name) ** 2
        if variances.size:
            limit_variance[name] = float(np.mean(variances))
    return DeltaSummary(
        delta_index=delta_index,
        delta_n=delta_n,
        k_n=k_n,
        n_success=len(succeeded),
        n_failed=len(results) - len(succeeded),
        failure_counts=dict(Counter(result.failure for result in results if not result.succeeded)),
        degenerate_counts=dict(Counter(label for result in succeeded for label in result.estimates.failures)),
        rmse=rmse,
        mean_error=mean_error,
        var_error=var_error,
        limit_variance=limit_variance,
    )


def _missing(name: str, detail: str) -> CheckOutcome:
    return CheckOutcome(name=name, passed=False, detail=detail)


def check_consistency(summaries: list[DeltaSummary]) -> CheckOutcome:
    """RMSE of the scaled realized skewness strictly decreases from coarse to fine steps."""
    values = [summary.rmse.get("skew") for summary in summaries]
    if len(values) < 2 or any(value is None for value in values):
        return _missing("consistency", "needs a skewness RMSE at two or more steps")
    decreasing = all(finer < coarser for coarser, finer in zip(values, values[1:]))
    return CheckOutcome(
        name="consistency",
        passed=decreasing,
        value=values[-1],
        threshold="strictly decreasing",
        detail=", ".join(f"{value:.4g}" for value in values),
    )


def check_rate(config: ExperimentConfig, summaries: list[DeltaSummary], slopes: dict[str, float]) -> CheckOutcome:
    values = [summary.rmse.get("rv") for summary in summaries]
    thresholds = config.thresholds
    if any(value is None for value in values):
        return _missing("rate", "no RV error at some step")
    try:
        slope = rate_regression(config.delta_grid, values)
    except DomainError as exc:
        return _missing("rate", str(exc))
    slopes["rv"] = slope
    return CheckOutcome(
        name="rate",
        passed=thresholds.rate_low <= slope <= thresholds.rate_high,
        value=slope,
        threshold=f"[{thresholds.rate_low}, {thresholds.rate_high}]",
    )


def _relative_gap(empirical: float, reference: float) -> float:
    return abs(empirical - reference) / abs(reference) if reference else math.inf


def check_clt_raw(config: ExperimentConfig, finest: list[ReplicationResult], ks: dict[str, float]) -> list[CheckOutcome]:
    """
    KS distance between SD-normalized cubic errors and SD-normalized limit draws, and the
    variance of the skewness errors against the variance of skewness limit draws.
    """
    thresholds = config.thresholds
    outcomes = []
    pairs = [
        (result.errors["cubic"] / result.oracle_sd["cubic"], result.limit_draws["cubic"] / result.oracle_sd["cubic"])
        for result in finest
        if result.succeeded and result.oracle_sd.get("cubic", 0.0) > 0.0
    ]
    if pairs:
        errors, draws = zip(*pairs)
        ks["cubic"] = ks_distance(errors, draws)
        outcomes.append(
            CheckOutcome(
                name="clt_raw:ks",
                passed=ks["cubic"] < thresholds.ks_max,
                value=ks["cubic"],
                threshold=f"< {thresholds.ks_max}",
            )
        )
    else:
        outcomes.append(_missing("clt_raw:ks", "no replication with a positive cubic limit variance"))

    abs_errors = _column(finest, "errors", "abs_cubic")
    abs_draws = _column(finest, "limit_draws", "abs_cubic")
    if abs_errors.size and abs_draws.size:
        ks["abs_cubic"] = ks_distance(abs_errors, abs_draws)

    skew_errors = _column([result for result in finest if result.succeeded], "errors", "skew")
    skew_draws = _column([result for result in finest if result.succeeded], "limit_draws", "skew")
    if skew_errors.size > 1 and skew_draws.size > 1:
        gap = _relative_gap(np.var(skew_errors, ddof=1), np.var(skew_draws, ddof=1))
        outcomes.append(
            CheckOutcome(
                name="clt_raw:skew_variance",
                passed=gap <= thresholds.variance_rel_tol,
                value=gap,
                threshold=f"<= {thresholds.variance_rel_tol}",
            )
        )
    else:
        outcomes.append(_missing("clt_raw:skew_variance", "fewer than two skewness errors"))
    return outcomes


def check_clt_noisy(
    config: ExperimentConfig, summaries: list[DeltaSummary], cells: list[list[ReplicationResult]]
) -> list[CheckOutcome]:
    """
    At the finest step: PRV error variance against the Gamma variance and PCV error mean against 0.
    On continuous scenarios also |mean Delta_n^{-1/4} PCV| must shrink from the coarsest to the finest step.
    """
    thresholds = config.thresholds
    finest = summaries[-1]
    outcomes = []
    if "prv" in finest.var_error and finest.limit_variance.get("prv"):
        gap = _relative_gap(finest.var_error["prv"], finest.limit_variance["prv"])
        outcomes.append(
            CheckOutcome(
                name="clt_noisy:prv_variance",
                passed=gap <= thresholds.variance_rel_tol,
                value=gap,
                threshold=f"<= {thresholds.variance_rel_tol}",
                detail=f"empirical {finest.var_error['prv']:.6g} vs Gamma {finest.limit_variance['prv']:.6g}",
            )
        )
    else:
        outcomes.append(_missing("clt_noisy:prv_variance", "no PRV errors at the finest step"))

    pcv_errors = _column([result for result in cells[-1] if result.succeeded], "errors", "pcv")
    if pcv_errors.size > 1:
        standard_error = float(np.std(pcv_errors, ddof=1)) / math.sqrt(pcv_errors.size)
        mean = float(np.mean(pcv_errors))
        outcomes.append(
            CheckOutcome(
                name="clt_noisy:pcv_mean",
                passed=abs(mean) <= thresholds.mean_se_multiple * standard_error,
                value=mean,
                threshold=f"|mean| <= {thresholds.mean_se_multiple} SE ({standard_error:.4g})",
            )
        )
    else:
        outcomes.append(_missing("clt_noisy:pcv_mean", "fewer than two PCV errors"))

    continuous = all(
        result.cubic_jump_sum == 0.0 for cell in cells for result in cell if result.succeeded
    )
    if continuous and len(summaries) > 1 and "pcv" in summaries[0].mean_error and "pcv" in finest.mean_error:
        coarse = abs(summaries[0].mean_error["pcv"])
        fine = abs(finest.mean_error["pcv"])
        outcomes.append(
            CheckOutcome(
                name="clt_noisy:pcv_degeneracy",
                passed=fine < coarse,
                value=fine,
                threshold=f"< {coarse:.4g}",
            )
        )
    return outcomes


def check_coverage(
    config: ExperimentConfig, finest: list[ReplicationResult], rates: dict[str, float]
) -> CheckOutcome:
    """Coverage of oracle-variance intervals for the noisy skewness at the finest step."""
    thresholds = config.thresholds
    usable = [
        result
        for result in finest
        if result.succeeded and "noisy_skew" in result.errors and "noisy_skew" in result.oracle_sd
    ]
    raw = [result for result in finest if result.succeeded and "skew" in result.errors and result.oracle_sd["skew"] > 0]
    if raw:
        rates["skew"] = coverage(
            [result.estimates.rdskew_scaled for result in raw],
            [result.estimand for result in raw],
            [result.oracle_sd["skew"] ** 2 for result in raw],
            raw[0].delta_n,
            RATES["skew"],
            thresholds.coverage_level,
        )
    if not usable:
        return _missing("coverage", "no replication with a non-degenerate noisy skewness variance")
    rate = coverage(
        [result.estimates.noisy_skew for result in usable],
        [result.estimand for result in usable],
        [result.oracle_sd["noisy_skew"] ** 2 for result in usable],
        usable[0].delta_n,
        RATES["noisy_skew"],
        thresholds.coverage_level,
    )
    rates["noisy_skew"] = rate
    return CheckOutcome(
        name="coverage",
        passed=thresholds.coverage_low <= rate <= thresholds.coverage_high,
        value=rate,
        threshold=f"[{thresholds.coverage_low}, {thresholds.coverage_high}]",
        detail=f"{len(usable)} replications",
    )


def counterexample_monte_carlo(
    settings: CounterexampleConfig, n: int, c_n: float, seed: int
) -> CounterexampleMonteCarlo:
    """
    Monte Carlo mean of Delta_n^{-1/2} sum g_a(Delta X^c) at Delta_n = exp(-n pi / a).

    X^c = sigma B is simulated with Euler step Delta_n and observed equidistantly; the mean
    should sit near 2 T c_n (twice because c_n integrates over the positive half-line).
    """
    delta_n = math.exp(-n * math.pi / settings.a)
    model = ModelSpec(volatility=VolatilityModel(sigma=settings.sigma), horizon=settings.horizon)
    observation = equidistant_times(delta_n, settings.horizon)
    values = np.empty(settings.n_reps)
    for replication in range(settings.n_reps):
        path = simulate_path(
            model,
            min(delta_n, settings.horizon),
            seed,
            observation_times=observation,
            key=(StreamLabel.COUNTEREXAMPLE, n, replication),
        )
        increments = np.diff(path.xc[np.searchsorted(path.grid, observation)])
        values[replication] = float(np.sum(g_a(increments, settings.a))) / math.sqrt(delta_n)
    result = CounterexampleMonteCarlo(
        n=n,
        delta_n=delta_n,
        c_n=c_n,
        mean=float(np.mean(values)),
        standard_error=float(np.std(values, ddof=1)) / math.sqrt(settings.n_reps) if settings.n_reps > 1 else 0.0,
        n_reps=settings.n_reps,
    )
    logger.info(f"Counterexample n={n}: mean {result.mean:.5g} (2 T c_n = {2 * settings.horizon * c_n:.5g})")
    return result


def check_counterexample(config: ExperimentConfig) -> tuple[list[CheckOutcome], list[CounterexampleMonteCarlo]]:
    """Alternation of c_n and opposite signs of the Monte Carlo means at two consecutive n."""
    settings = config.counterexample
    terms = counterexample_sequence(settings.a, max(settings.n_max, settings.n_values[1]), settings.panels)
    values = np.array([term.c_n for term in terms[: settings.n_max]])
    gap = float(np.max(np.abs(values[1:] + values[:-1]))) if values.size > 1 else 0.0
    spread = float(np.max(np.abs(np.abs(values) - abs(values[0]))))
    outcomes = [
        CheckOutcome(
            name="counterexample:alternation",
            passed=gap <= ALTERNATION_TOLERANCE and spread <= ALTERNATION_TOLERANCE,
            value=max(gap, spread),
            threshold=f"<= {ALTERNATION_TOLERANCE}",
        )
    ]
    by_n = {term.n: term.c_n for term in terms}
    monte_carlo = [counterexample_monte_carlo(settings, n, by_n[n], config.seed) for n in settings.n_values]
    first, second = monte_carlo
    outcomes.append(
        CheckOutcome(
            name="counterexample:monte_carlo_sign",
            passed=first.mean * second.mean < 0.0,
            value=first.mean * second.mean,
            threshold="< 0",
            detail=f"means {first.mean:.5g} (n={first.n}) and {second.mean:.5g} (n={second.n})",
        )
    )
    return outcomes, monte_carlo


def run_experiment(config: ExperimentConfig, workers: Optional[int] = None) -> ExperimentReport:
    """
    Run every (Delta_n, replication) cell and the configured checks.

    Parameters:
        config (ExperimentConfig): The experiment; `n_reps = 0` validates and returns a dry-run report.
        workers (int, optional): Worker processes; overrides `config.workers`. One worker runs inline.

    Returns:
        ExperimentReport: Replications, per-step summaries, statistics and check outcomes.
    """
    constants = kernel_constants(config.kernel)
    grid = config.delta_grid
    k_values = [choose_kn(config.theta, step) for step in grid]
    if config.n_reps == 0:
        logger.info(f"Dry run: {len(grid)} steps, checks {list(config.checks)}")
        summaries = tuple(
            DeltaSummary(delta_index=index, delta_n=step, k_n=k_n, n_success=0, n_failed=0)
            for index, (step, k_n) in enumerate(zip(grid, k_values))
        )
        return ExperimentReport(config=config, dry_run=True, summaries=summaries)

    workers = workers or config.workers or 1
    cells = [(index, replication) for index in range(len(grid)) for replication in range(config.n_reps)]
    logger.info(f"Running {len(cells)} replications over {len(grid)} steps on {workers} worker(s)")
    try:
        if workers > 1:
            with Pool(processes=workers) as pool:
                results = pool.starmap(
                    run_replication,
                    zip(repeat(config), (cell[0] for cell in cells), (cell[1] for cell in cells), repeat(constants)),
                )
        else:
            results = [run_replication(config, index, replication, constants) for index, replication in cells]
    except Exception as e:
        logger.error(f"Experiment aborted: {e}", exc_info=True)
        raise

    by_step = [[result for result in results if result.delta_index == index] for index in range(len(grid))]
    summaries = [summarize(index, grid[index], by_step[index], k_values[index]) for index in range(len(grid))]

    slopes: dict[str, float] = {}
    ks: dict[str, float] = {}
    rates: dict[str, float] = {}
    checks: list[CheckOutcome] = []
    counterexample: list[CounterexampleMonteCarlo] = []
    for name in config.checks:
        if name == "consistency":
            checks.append(check_consistency(summaries))
        elif name == "rate":
            checks.append(check_rate(config, summaries, slopes))
        elif name == "clt_raw":
            checks.extend(check_clt_raw(config, by_step[-1], ks))
        elif name == "clt_noisy":
            checks.extend(check_clt_noisy(config, summaries, by_step))
        elif name == "coverage":
            checks.append(check_coverage(config, by_step[-1], rates))
        elif name == "counterexample":
            outcomes, counterexample = check_counterexample(config)
            checks.extend(outcomes)

    for check in checks:
        logger.info(f"Check {check.name}: {'passed' if check.passed else 'FAILED'} (value={check.value})")
    return ExperimentReport(
        config=config,
        replications=tuple(results),
        summaries=tuple(summaries),
        rate_slopes=slopes,
        ks_distances=ks,
        coverage_rates=rates,
        counterexample=tuple(counterexample),
        checks=tuple(checks),
    )
