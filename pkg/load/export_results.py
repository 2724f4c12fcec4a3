import csv
import io
import json
import os
import sys
from typing import Iterable, Optional, Sequence

import numpy as np
from pydantic import BaseModel

from harness.run_experiment import RATES
from logging_setup import get_logger
from models.experiment import ExperimentReport
from models.limit_law import CounterexampleTerm
from models.path_record import PathRecord
from models.sampling import SamplingTimes

# Get configured logger for this module
logger = get_logger(__name__)


def format_value(value) -> str:
    """Shortest round-trip text of a float; empty for missing values."""
    if value is None:
        return ""
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def atomic_write(path: Optional[str], text: str) -> None:
    """
    Write text to `path` through a temporary file and a rename, or to stdout when path is None or "-".

    Parameters:
        path (str, optional): Destination file.
        text (str): Full content.
    """
    if path is None or path == "-":
        sys.stdout.write(text)
        return
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    tmp_path = f"{path}.tmp"
    try:
        with open(tmp_path, "w", newline="", encoding="utf-8") as file:
            file.write(text)
        os.replace(tmp_path, path)
        logger.info(f"Wrote {path}")
    except Exception as e:
        logger.error(f"Failed to write {path}: {str(e)}", exc_info=True)
        if os.path.exists(tmp_path):
            os.remove(tmp_path)
        raise


def write_csv(path: Optional[str], header: Sequence[str], rows: Iterable[Sequence]) -> None:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([format_value(value) for value in row])
    atomic_write(path, buffer.getvalue())


def write_json(path: Optional[str], payload) -> None:
    """Dump a pydantic model or a plain mapping as indented JSON."""
    if isinstance(payload, BaseModel):
        text = payload.model_dump_json(indent=2)
    else:
        text = json.dumps(payload, indent=2)
    atomic_write(path, text + "\n")


def jumps_path_for(path: str) -> str:
    """Default location of the jump ledger next to a path export: path.csv -> path_jumps.csv."""
    stem, extension = os.path.splitext(path)
    return f"{stem}_jumps{extension or '.csv'}"


def export_path(path: PathRecord, output: str, jumps_output: Optional[str] = None) -> None:
    """Write the path CSV (time, x, xc, sigma) and the jump-ledger CSV (time, size, sigma_minus, sigma_plus)."""
    write_csv(output, ("time", "x", "xc", "sigma"), zip(path.grid, path.x, path.xc, path.sigma))
    write_csv(
        jumps_output or jumps_path_for(output),
        ("time", "size", "sigma_minus", "sigma_plus"),
        ((jump.time, jump.size, jump.sigma_minus, jump.sigma_plus) for jump in path.jumps),
    )


def export_ticks(times: np.ndarray, values: np.ndarray, output: Optional[str]) -> None:
    write_csv(output, ("time", "price"), zip(times, values))


def export_times(times: SamplingTimes, output: Optional[str]) -> None:
    write_csv(output, ("time", "g"), zip(times.times, times.g_process))


def export_counterexample(terms: Sequence[CounterexampleTerm], output: Optional[str]) -> None:
    write_csv(output, ("n", "delta_n", "c_n"), ((term.n, term.delta_n, term.c_n) for term in terms))


def export_report(report: ExperimentReport, output: Optional[str], csv_output: Optional[str]) -> None:
    """
    Write the report JSON (config, summaries, statistics and checks) and, when `csv_output`
    is given, the long-form CSV with one row per (Delta_n, replication).
    """
    write_json(output, json.loads(report.model_dump_json(exclude={"replications"})) | {"passed": report.passed})
    if csv_output is None:
        return
    estimate_fields = (
        "rv",
        "cubic_pv",
        "abs_cubic_pv",
        "rdskew_raw",
        "rdskew_scaled",
        "prv",
        "pcv",
        "noisy_skew",
    )
    header = (
        ["delta_index", "delta_n", "replication", "failure", "degenerate", "qv", "cubic_jump_sum", "estimand"]
        + list(estimate_fields)
        + [f"{prefix}_{name}" for prefix in ("error", "sd", "draw") for name in RATES]
    )
    rows = []
    for result in report.replications:
        estimates = result.estimates
        row = [
            result.delta_index,
            result.delta_n,
            result.replication,
            result.failure,
            ";".join(estimates.failures) if estimates is not None else None,
            result.qv,
            result.cubic_jump_sum,
            result.estimand,
        ]
        row += [getattr(estimates, field) if estimates is not None else None for field in estimate_fields]
        for mapping in (result.errors, result.oracle_sd, result.limit_draws):
            row += [mapping.get(name) for name in RATES]
        rows.append(row)
    write_csv(csv_output, header, rows)
