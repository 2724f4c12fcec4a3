# Import our centralized logging setup
from logging_setup import get_logger, set_verbosity
import argparse
import logging
import os
import sys
import time
import uuid
from typing import Optional, Sequence

import numpy as np
from pydantic import ValidationError

from errors import ConfigurationError, DomainError, KernelValidityError, SkewLabError
from estimators.estimate_set import estimate_all
from extract.extract_inputs import default_delta_n, read_config, read_kernel, read_path, read_ticks
from harness.run_experiment import run_experiment
from kernels.kernel_constants import kernel_constants
from kernels.quadrature import DEFAULT_PANELS
from limitlaw.counterexample import (
    DEFAULT_COUNTEREXAMPLE_PANELS,
    counterexample_sequence,
    find_counterexample_parameter,
)
from limitlaw.gamma import gamma_matrix, noisy_skew_variance
from limitlaw.oracles import limit_law_params
from limitlaw.samplers import abs_cubic_limit_sample, skew_limit_sample, thm2_limit_sample
from load.export_results import (
    export_counterexample,
    export_path,
    export_report,
    export_ticks,
    export_times,
    write_csv,
    write_json,
)
from models.cli_config import LimitsConfig, NoiseConfig, SimulateConfig, TimesConfig
from models.estimates import ObservedSeries
from models.experiment import ExperimentConfig
from simkit.apply_noise import apply_noise
from simkit.generate_times import generate_times, sampling_times_from
from simkit.observe import simulate_observed
from simkit.sample_process import sample_process, sigma_at
from simkit.simulate_path import simulate_path

# Get a configured logger for this module
logger = get_logger(__name__)

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_CONFIG_ERROR = 2
# Default worker count of `experiment`
WORKERS_ENV = "SKEWLAB_WORKERS"


def _seed(args, config_seed: int) -> int:
    return config_seed if args.seed is None else args.seed


def _optional_path(args):
    if args.path is None:
        return None
    return read_path(args.path, args.jumps)


def run_simulate(args) -> int:
    config = read_config(args.config, SimulateConfig)
    seed = _seed(args, config.seed)
    if config.sampling is not None and config.delta_n is not None:
        path, times = simulate_observed(config.model, config.sampling, config.delta_n, config.euler_step, seed)
        if args.ticks:
            export_ticks(times.observed, sample_process(path, times), args.ticks)
    else:
        if args.ticks:
            raise ConfigurationError("--ticks needs `sampling` and `delta_n` in the config")
        path = simulate_path(config.model, config.euler_step, seed)
    export_path(path, args.output, args.jumps)
    return EXIT_OK


def run_times(args) -> int:
    config = read_config(args.config, TimesConfig)
    times = generate_times(
        config.sampling, config.delta_n, config.horizon, _seed(args, config.seed), path=_optional_path(args)
    )
    export_times(times, args.output)
    return EXIT_OK


def run_noise(args) -> int:
    config = read_config(args.config, NoiseConfig)
    times, prices = read_ticks(args.input)
    horizon = config.horizon
    inside = times <= horizon
    sampling = sampling_times_from(times[inside], horizon, default_delta_n(times, horizon))
    path = _optional_path(args)
    sigma = sigma_at(path, sampling.observed) if path is not None else None
    noisy = apply_noise(prices[inside], sampling, config.noise, _seed(args, config.seed), sigma=sigma)
    export_ticks(sampling.observed, noisy, args.output)
    return EXIT_OK


def run_estimate(args) -> int:
    times, prices = read_ticks(args.input)
    horizon = args.horizon if args.horizon is not None else float(times[-1])
    if not horizon > 0.0:
        raise ConfigurationError("the horizon must be positive")
    inside = times <= horizon
    sampling = sampling_times_from(times[inside], horizon, args.delta_n)
    series = ObservedSeries(times=sampling, values=prices[inside])
    kernel = read_kernel(args.kernel)
    estimates = estimate_all(series, args.delta_n, horizon, args.theta, kernel)
    write_json(args.output, estimates)
    return EXIT_OK


def run_constants(args) -> int:
    write_json(args.output, kernel_constants(read_kernel(args.kernel), args.panels))
    return EXIT_OK


def run_limits(args) -> int:
    config = read_config(args.config, LimitsConfig)
    seed = _seed(args, config.seed)
    path = read_path(args.path, args.jumps)
    params = limit_law_params(path, config.sampling, config.noise)
    constants = kernel_constants(config.kernel)
    gamma = gamma_matrix(params, config.theta, constants)
    unsquared = gamma_matrix(params, config.theta, constants, squared_phi3_minus=False)
    variance = noisy_skew_variance(gamma, params.qv, params.cubic_jump_sum)
    components = [
        ("gamma_c", gamma.gamma_c),
        ("gbar11", gamma.gbar11),
        ("gbar12", gamma.gbar12),
        ("gbar22", gamma.gbar22),
        ("gbar22_unsquared_phi3_minus", unsquared.gbar22),
        ("min_eigenvalue", gamma.min_eigenvalue),
        ("d1", variance.d1),
        ("d2", variance.d2),
        ("noisy_skew_variance", variance.value),
        ("noisy_skew_degenerate", float(variance.degenerate)),
    ]
    write_csv(args.gamma_output, ("component", "value"), components)

    joint = thm2_limit_sample(params, "cube", config.n_draws, seed)
    abs_cubic = abs_cubic_limit_sample(params, config.n_draws, seed)
    skew = skew_limit_sample(params, config.n_draws, seed)
    write_csv(
        args.output,
        ("draw", "rv", "cubic", "abs_cubic", "skew"),
        zip(np.arange(config.n_draws), joint.continuous, joint.jump, abs_cubic, skew),
    )
    return EXIT_OK


def run_experiment_command(args) -> int:
    config = read_config(args.config, ExperimentConfig)
    if args.seed is not None:
        config = ExperimentConfig.model_validate(config.model_dump() | {"seed": args.seed})
    workers = args.workers or _env_workers()
    report = run_experiment(config, workers)
    export_report(report, args.output, args.csv)
    if not report.passed:
        failed = [check.name for check in report.checks if not check.passed]
        logger.warning(f"Failed checks: {failed}")
        return EXIT_CHECK_FAILED
    return EXIT_OK


def run_counterexample(args) -> int:
    a = args.a if args.a is not None else find_counterexample_parameter(panels=args.panels)
    export_counterexample(counterexample_sequence(a, args.n_max, args.panels), args.output)
    return EXIT_OK


def _env_workers() -> Optional[int]:
    value = os.getenv(WORKERS_ENV)
    if not value:
        return None
    try:
        workers = int(value)
    except ValueError as e:
        raise ConfigurationError(f"{WORKERS_ENV} must be a positive integer, got {value!r}") from e
    if workers < 1:
        raise ConfigurationError(f"{WORKERS_ENV} must be a positive integer, got {value!r}")
    return workers


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-v", "--verbose", action="count", default=0, help="INFO with -v, DEBUG with -vv")
    common.add_argument("-q", "--quiet", action="store_true", help="Only report errors")

    seeded = argparse.ArgumentParser(add_help=False)
    seeded.add_argument("--seed", type=int, help="Override the seed of the config")

    with_path = argparse.ArgumentParser(add_help=False)
    with_path.add_argument("--path", help="Path export CSV (time, x, xc, sigma)")
    with_path.add_argument("--jumps", help="Jump ledger CSV (time, size, sigma_minus, sigma_plus)")

    parser = argparse.ArgumentParser(description="Realized skewness and pre-averaging estimators under jumps and noise")
    commands = parser.add_subparsers(dest="command", required=True)

    simulate = commands.add_parser("simulate", parents=[common, seeded], help="Simulate a jump-diffusion path")
    simulate.add_argument("--config", required=True, help="SimulateConfig JSON")
    simulate.add_argument("--output", required=True, help="Path CSV to write")
    simulate.add_argument("--jumps", help="Jump ledger CSV (default: <output>_jumps.csv)")
    simulate.add_argument("--ticks", help="Observed (time, price) CSV; needs sampling and delta_n in the config")
    simulate.set_defaults(handler=run_simulate)

    times = commands.add_parser("times", parents=[common, seeded, with_path], help="Generate observation times")
    times.add_argument("--config", required=True, help="TimesConfig JSON")
    times.add_argument("--output", help="Times CSV (time, g); stdout when omitted")
    times.set_defaults(handler=run_times)

    noise = commands.add_parser("noise", parents=[common, seeded, with_path], help="Add microstructure noise to ticks")
    noise.add_argument("--config", required=True, help="NoiseConfig JSON")
    noise.add_argument("--input", required=True, help="Latent (time, price) CSV")
    noise.add_argument("--output", help="Noisy (time, price) CSV; stdout when omitted")
    noise.set_defaults(handler=run_noise)

    estimate = commands.add_parser("estimate", parents=[common], help="Estimate on a (time, price) CSV")
    estimate.add_argument("--input", required=True, help="(time, price) CSV")
    estimate.add_argument("--delta-n", type=float, required=True, help="Sampling step Delta_n")
    estimate.add_argument("--theta", type=float, help="Pre-averaging constant; skips PRV/PCV when omitted")
    estimate.add_argument("--kernel", default="min", help="min or a KernelSpec JSON file")
    estimate.add_argument("--horizon", type=float, help="Horizon T (default: last tick time)")
    estimate.add_argument("--output", help="EstimateSet JSON; stdout when omitted")
    estimate.set_defaults(handler=run_estimate)

    constants = commands.add_parser("constants", parents=[common], help="psi and Phi constants of a kernel")
    constants.add_argument("--kernel", default="min", help="min or a KernelSpec JSON file")
    constants.add_argument("--panels", type=int, default=DEFAULT_PANELS, help="Simpson panels")
    constants.add_argument("--output", help="JSON file; stdout when omitted")
    constants.set_defaults(handler=run_constants)

    limits = commands.add_parser("limits", parents=[common, seeded], help="Gamma components and limit draws of a path")
    limits.add_argument("--config", required=True, help="LimitsConfig JSON")
    limits.add_argument("--path", required=True, help="Path export CSV")
    limits.add_argument("--jumps", help="Jump ledger CSV")
    limits.add_argument("--output", help="Limit draws CSV; stdout when omitted")
    limits.add_argument("--gamma-output", help="Gamma components CSV; stdout when omitted")
    limits.set_defaults(handler=run_limits)

    experiment = commands.add_parser("experiment", parents=[common, seeded], help="Run a Monte Carlo experiment")
    experiment.add_argument("--config", required=True, help="ExperimentConfig JSON")
    experiment.add_argument("--output", help="Report JSON; stdout when omitted")
    experiment.add_argument("--csv", help="Long-form CSV with one row per replication")
    experiment.add_argument("--workers", type=int, help=f"Worker processes (default: ${WORKERS_ENV} or the config)")
    experiment.set_defaults(handler=run_experiment_command)

    counterexample = commands.add_parser("counterexample", parents=[common], help="The alternating sequence c_n")
    counterexample.add_argument("--a", type=float, help="Parameter of g_a (default: first usable of 0.5, 1, 2, 4)")
    counterexample.add_argument("--n-max", type=int, default=20, help="Last index n")
    counterexample.add_argument("--panels", type=int, default=DEFAULT_COUNTEREXAMPLE_PANELS, help="Simpson panels")
    counterexample.add_argument("--output", help="CSV (n, delta_n, c_n); stdout when omitted")
    counterexample.set_defaults(handler=run_counterexample)
    return parser


def dispatch(argv: Optional[Sequence[str]] = None) -> int:
    """
    Parse argv, run the subcommand and map its outcome to an exit code.

    Returns:
        int: 0 on success, 1 when a check fails or a computation is degenerate,
            2 on a usage, input or schema error.
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_CONFIG_ERROR

    if args.quiet:
        set_verbosity(logging.ERROR)
    elif args.verbose:
        set_verbosity(logging.DEBUG if args.verbose > 1 else logging.INFO)

    run_id = uuid.uuid4()
    start_time = time.time()
    logger.info(f"Starting {args.command} with run_id: {run_id}")
    try:
        code = args.handler(args)
    except (ValidationError, ConfigurationError, DomainError, KernelValidityError) as e:
        logger.error(f"{args.command} rejected its input: {e}")
        return EXIT_CONFIG_ERROR
    except SkewLabError as e:
        logger.error(f"{args.command} failed: {e}")
        return EXIT_CHECK_FAILED

    execution_time = time.time() - start_time
    logger.info(f"{args.command} completed in {execution_time:.2f} seconds (Run ID: {run_id})")
    return code


if __name__ == "__main__":
    sys.exit(dispatch())
