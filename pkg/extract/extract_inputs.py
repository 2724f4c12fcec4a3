import csv
import math
from pathlib import Path
from typing import Optional, TypeVar

import numpy as np
from pydantic import BaseModel, ValidationError

from errors import ConfigurationError
from logging_setup import get_logger
from models.kernel import KernelSpec
from models.path_record import JumpRecord, PathRecord
from simkit.simulate_path import compute_oracles

# Get configured logger for this module
logger = get_logger(__name__)

Config = TypeVar("Config", bound=BaseModel)

BUILTIN_KERNELS = {
    "min": KernelSpec(),
}


def read_config(path: str, model: type[Config]) -> Config:
    """
    Read and validate a JSON config file.

    Parameters:
        path (str): Location of the JSON document.
        model (type[BaseModel]): The config model; unknown keys are rejected by the model.

    Returns:
        BaseModel: The validated config.

    Raises:
        ConfigurationError: If the file cannot be read.
        ValidationError: If the document does not match the schema.
    """
    try:
        logger.debug(f"Reading {model.__name__} from {path}")
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        logger.error(f"Cannot read config file {path}: {e}")
        raise ConfigurationError(f"cannot read config file {path}") from e

    try:
        config = model.model_validate_json(text)
        logger.info(f"Read {model.__name__} from {path}")
    except ValidationError as e:
        logger.error(f"Error validating {path}: {e}")
        raise e
    return config


def read_kernel(value: str) -> KernelSpec:
    """The builtin kernel name "min" or the path of a KernelSpec JSON file."""
    if value in BUILTIN_KERNELS:
        return BUILTIN_KERNELS[value]
    return read_config(value, KernelSpec)


def _read_columns(path: str, columns: tuple[str, ...]) -> dict[str, np.ndarray]:
    try:
        with open(path, newline="", encoding="utf-8") as file:
            reader = csv.DictReader(file)
            missing = [column for column in columns if column not in (reader.fieldnames or ())]
            if missing:
                raise ConfigurationError(f"{path} lacks the columns {missing}")
            rows = [[row[column] for column in columns] for row in reader]
    except OSError as e:
        logger.error(f"Cannot read {path}: {e}")
        raise ConfigurationError(f"cannot read {path}") from e

    try:
        values = np.array(rows, dtype=float).reshape(len(rows), len(columns))
    except ValueError as e:
        logger.error(f"Non-numeric entry in {path}: {e}")
        raise ConfigurationError(f"non-numeric entry in {path}") from e
    if not np.isfinite(values).all():
        raise ConfigurationError(f"non-finite entry in {path}")
    return {column: values[:, index] for index, column in enumerate(columns)}


def read_ticks(path: str) -> tuple[np.ndarray, np.ndarray]:
    """
    Read a (time, price) CSV with a header row.

    Raises:
        ConfigurationError: If the file is unreadable, empty, misses a column or holds a
            non-numeric, non-finite or non-increasing entry.
    """
    columns = _read_columns(path, ("time", "price"))
    times = columns["time"]
    if times.size == 0:
        raise ConfigurationError(f"{path} holds no ticks")
    if times[0] != 0.0 or (times.size > 1 and not (np.diff(times) > 0.0).all()):
        raise ConfigurationError(f"tick times in {path} must start at 0 and increase strictly")
    logger.info(f"Read {times.size} ticks from {path}")
    return times, columns["price"]


def read_path(path: str, jumps_path: Optional[str] = None) -> PathRecord:
    """
    Read a path export (time, x, xc, sigma) and its jump ledger (time, size, sigma_minus, sigma_plus).

    The oracle functionals are recomputed from the grid, sigma and the ledger.

    Raises:
        ConfigurationError: If a file is unreadable or malformed.
        ValidationError: If the grid is not strictly increasing.
    """
    columns = _read_columns(path, ("time", "x", "xc", "sigma"))
    ledger: tuple[JumpRecord, ...] = ()
    if jumps_path is not None:
        jumps = _read_columns(jumps_path, ("time", "size", "sigma_minus", "sigma_plus"))
        ledger = tuple(
            JumpRecord(time=time, size=size, sigma_minus=minus, sigma_plus=plus)
            for time, size, minus, plus in zip(
                jumps["time"], jumps["size"], jumps["sigma_minus"], jumps["sigma_plus"]
            )
        )
    grid = columns["time"]
    sizes = np.array([jump.size for jump in ledger], dtype=float)
    try:
        record = PathRecord(
            grid=grid,
            x=columns["x"],
            xc=columns["xc"],
            sigma=columns["sigma"],
            jumps=ledger,
            oracles=compute_oracles(grid, columns["sigma"], sizes),
        )
    except ValidationError as e:
        logger.error(f"Error validating path {path}: {e}")
        raise e
    logger.info(f"Read path with {grid.size} grid points and {len(ledger)} jumps from {path}")
    return record


def default_delta_n(times: np.ndarray, horizon: float) -> float:
    """Mean spacing T / N of a tick file, used when no Delta_n is given."""
    count = int(np.searchsorted(times, horizon, side="right")) - 1
    return horizon / max(count, 1) if math.isfinite(horizon) and horizon > 0.0 else 1.0
