import numpy as np
import pytest
from pydantic import ValidationError

from errors import ConfigurationError
from extract.extract_inputs import default_delta_n, read_config, read_kernel, read_path, read_ticks
from load.export_results import export_path
from models.cli_config import TimesConfig
from models.kernel import KernelSpec
from models.model_spec import FixedJump, JumpModel, ModelSpec
from simkit.simulate_path import simulate_path


def write(tmp_path, name, text):
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return str(path)


def test_read_config_validates_the_document(tmp_path):
    config = read_config(write(tmp_path, "times.json", '{"delta_n": 0.01, "seed": 4}'), TimesConfig)
    assert config.delta_n == 0.01
    assert config.seed == 4
    assert config.sampling.kind == "equidistant"


def test_read_config_rejects_unknown_keys(tmp_path):
    with pytest.raises(ValidationError):
        read_config(write(tmp_path, "times.json", '{"delta_n": 0.01, "delta": 0.02}'), TimesConfig)


def test_read_config_missing_file(tmp_path):
    with pytest.raises(ConfigurationError):
        read_config(str(tmp_path / "absent.json"), TimesConfig)


def test_read_kernel_builtin_and_file(tmp_path):
    assert read_kernel("min") == KernelSpec()
    spec = read_kernel(write(tmp_path, "kernel.json", '{"form": "min", "scale": 2.0}'))
    assert spec.kernel_id == "min*2"


def test_read_ticks(tmp_path):
    times, prices = read_ticks(write(tmp_path, "ticks.csv", "time,price\n0,1.5\n0.5,1.25\n1,1.75\n"))
    np.testing.assert_array_equal(times, [0.0, 0.5, 1.0])
    np.testing.assert_array_equal(prices, [1.5, 1.25, 1.75])


@pytest.mark.parametrize(
    "text",
    [
        "time,value\n0,1\n",
        "time,price\n0,abc\n",
        "time,price\n0,nan\n",
        "time,price\n0,1\n0.5,1\n0.5,2\n",
        "time,price\n0.1,1\n",
        "time,price\n",
    ],
)
def test_malformed_ticks_are_configuration_errors(tmp_path, text):
    with pytest.raises(ConfigurationError):
        read_ticks(write(tmp_path, "ticks.csv", text))


def test_read_path_round_trip(tmp_path):
    """A path export reads back with identical arrays, ledger and oracles."""
    model = ModelSpec(jumps=JumpModel(fixed_jumps=(FixedJump(time=0.25, size=-0.1),)))
    path = simulate_path(model, 0.01, seed=2)
    output = str(tmp_path / "path.csv")
    export_path(path, output)
    restored = read_path(output, str(tmp_path / "path_jumps.csv"))
    np.testing.assert_array_equal(restored.grid, path.grid)
    np.testing.assert_array_equal(restored.x, path.x)
    np.testing.assert_array_equal(restored.sigma, path.sigma)
    assert restored.jumps == path.jumps
    assert restored.oracles.quadratic_variation == pytest.approx(path.oracles.quadratic_variation)
    assert restored.oracles.cubic_jump_sum == pytest.approx(-0.001)


def test_read_path_without_ledger_has_no_jumps(tmp_path):
    path = simulate_path(ModelSpec(), 0.1, seed=0)
    output = str(tmp_path / "path.csv")
    export_path(path, output)
    assert read_path(output).jumps == ()


def test_default_delta_n():
    assert default_delta_n(np.array([0.0, 0.5, 1.0]), 1.0) == 0.5
    assert default_delta_n(np.array([0.0]), 1.0) == 1.0
