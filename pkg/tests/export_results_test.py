import csv
import json

import pytest

from load.export_results import (
    atomic_write,
    export_counterexample,
    export_report,
    format_value,
    jumps_path_for,
)
from models.estimates import EstimateSet, Tuning
from models.experiment import CheckOutcome, ExperimentConfig, ExperimentReport, ReplicationResult
from models.limit_law import CounterexampleTerm


def report_with(passed=True):
    estimates = EstimateSet(rv=0.09, cubic_pv=0.001, abs_cubic_pv=0.002, failures=("prv",), tuning=Tuning(delta_n=0.01))
    replications = (
        ReplicationResult(
            delta_index=0,
            delta_n=0.01,
            replication=0,
            estimates=estimates,
            qv=0.09,
            cubic_jump_sum=0.0,
            estimand=0.0,
            errors={"rv": 0.5},
            oracle_sd={"rv": 0.1},
            limit_draws={"rv": -0.2},
        ),
        ReplicationResult(delta_index=0, delta_n=0.01, replication=1, failure="degenerate_rv"),
    )
    return ExperimentReport(
        config=ExperimentConfig(delta_grid=(0.01,), n_reps=2),
        replications=replications,
        checks=(CheckOutcome(name="rate", passed=passed, value=0.5),),
    )


def test_format_value():
    assert format_value(0.1) == "0.1"
    assert format_value(1e-20) == "1e-20"
    assert format_value(None) == ""
    assert format_value(3) == "3"


def test_atomic_write_creates_directories_and_leaves_no_temporary_file(tmp_path):
    target = tmp_path / "nested" / "out.txt"
    atomic_write(str(target), "hello\n")
    assert target.read_text() == "hello\n"
    assert not (tmp_path / "nested" / "out.txt.tmp").exists()


def test_atomic_write_to_stdout(capsys):
    atomic_write("-", "to stdout\n")
    atomic_write(None, "again\n")
    assert capsys.readouterr().out == "to stdout\nagain\n"


def test_failed_rename_keeps_the_previous_file(tmp_path, mocker):
    target = tmp_path / "out.txt"
    target.write_text("old")
    mocker.patch("load.export_results.os.replace", side_effect=OSError("disk full"))
    with pytest.raises(OSError):
        atomic_write(str(target), "new")
    assert target.read_text() == "old"
    assert not (tmp_path / "out.txt.tmp").exists()


def test_jumps_path_for():
    assert jumps_path_for("out/path.csv") == "out/path_jumps.csv"
    assert jumps_path_for("path") == "path_jumps.csv"


def test_export_counterexample(tmp_path):
    output = tmp_path / "c.csv"
    export_counterexample([CounterexampleTerm(n=1, delta_n=0.5, c_n=-0.25)], str(output))
    assert output.read_text().splitlines() == ["n,delta_n,c_n", "1,0.5,-0.25"]


def test_export_report_writes_summary_json_and_long_csv(tmp_path):
    output = tmp_path / "report.json"
    long_form = tmp_path / "report.csv"
    export_report(report_with(passed=False), str(output), str(long_form))

    payload = json.loads(output.read_text())
    assert payload["passed"] is False
    assert "replications" not in payload
    assert payload["checks"][0]["name"] == "rate"

    with open(long_form, newline="") as file:
        rows = list(csv.DictReader(file))
    assert len(rows) == 2
    assert rows[0]["rv"] == "0.09"
    assert rows[0]["degenerate"] == "prv"
    assert rows[0]["error_rv"] == "0.5" and rows[0]["draw_rv"] == "-0.2"
    assert rows[0]["error_prv"] == ""
    assert rows[1]["failure"] == "degenerate_rv"
    assert rows[1]["rv"] == ""


def test_export_report_without_csv(tmp_path):
    output = tmp_path / "report.json"
    export_report(report_with(), str(output), None)
    assert json.loads(output.read_text())["passed"] is True
    assert list(tmp_path.iterdir()) == [output]
