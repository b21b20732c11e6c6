import json

import numpy as np
import pytest

from hy_leadlag.cli import TickFileSpec, build_parser, ingest, main
from hy_leadlag.cli.ingest import unit_to_ticks
from hy_leadlag.cli.output import read_config
from hy_leadlag.errors import IngestError, InvalidInputError
from hy_leadlag.models import BachelierParams, Synchronous
from hy_leadlag.simulate import sample, simulate_bachelier


def _write(path, text):
    path.write_text(text)
    return str(path)


def _csv_rows(text):
    lines = text.splitlines()
    assert lines[0].startswith("# config: ")
    return lines[1], [line.split(",") for line in lines[2:]]


@pytest.fixture
def simulated(tmp_path):
    x_path = tmp_path / "bund.csv"
    y_path = tmp_path / "fdax.csv"
    assert main(["simulate", "--seed", "4", "--out-x", str(x_path), "--out-y", str(y_path)]) == 0
    return str(x_path), str(y_path)


def test_ingest_milliseconds(tmp_path):
    path = _write(tmp_path / "t.csv", "t,p\n0.000,100.0\n0.001,100.5\n0.002,100.25\n")
    series = ingest(TickFileSpec(path=path, time_unit="milliseconds"))
    assert series.times.tolist() == [0, 1, 2]
    assert series.prices.tolist() == [100.0, 100.5, 100.25]
    assert series.label == "t"


def test_ingest_named_columns_and_delimiter(tmp_path):
    text = "# exported ticks\nprice;time\n1.5;10\n1.25;20\n1.75;35\n"
    path = _write(tmp_path / "named.csv", text)
    spec = TickFileSpec(path=path, time_column="time", price_column="price", delimiter=";")
    series = ingest(spec)
    assert series.times.tolist() == [10_000_000, 20_000_000, 35_000_000]
    assert series.prices.tolist() == [1.5, 1.25, 1.75]


def test_ingest_without_header(tmp_path):
    path = _write(tmp_path / "raw.csv", "0,1.0\n5,2.0\n")
    series = ingest(TickFileSpec(path=path, header=False, time_unit="microseconds"))
    assert series.times.tolist() == [0, 5]


@pytest.mark.parametrize(
    "text, code, row",
    [
        ("t,p\n0,1\n2,1\n1,1\n", "non-monotone", 3),
        ("t,p\n0,1\n1,1\n1,2\n", "duplicate-timestamp", 3),
        ("t,p\n0,1\nsoon,1\n", "parse-error", 2),
        ("t,p\n0,1\n1,abc\n", "parse-error", 2),
        ("t,p\n0,1\n1,nan\n", "parse-error", 2),
        ("t,p\n0,1\n0.0000001,1\n", "precision-loss", 2),
        ("t,p\n0,1\n1e20,1\n", "unit-overflow", 2),
    ],
)
def test_ingest_errors_name_the_row(tmp_path, text, code, row):
    path = _write(tmp_path / "bad.csv", text)
    with pytest.raises(IngestError) as info:
        ingest(TickFileSpec(path=path))
    assert info.value.code == code
    assert info.value.row == row
    assert f"row {row}" in str(info.value)


@pytest.mark.parametrize("text", ["", "t,p\n"])
def test_ingest_empty(tmp_path, text):
    path = _write(tmp_path / "empty.csv", text)
    with pytest.raises(IngestError) as info:
        ingest(TickFileSpec(path=path))
    assert info.value.code == "empty-file"


def test_ingest_single_row(tmp_path):
    path = _write(tmp_path / "one.csv", "t,p\n0,1\n")
    with pytest.raises(IngestError, match="at least 2"):
        ingest(TickFileSpec(path=path))


def test_ingest_missing_file(tmp_path):
    with pytest.raises(IngestError) as info:
        ingest(TickFileSpec(path=str(tmp_path / "nope.csv")))
    assert info.value.code == "io-error"


def test_undecodable_file_is_a_parse_error(tmp_path, capsys):
    path = tmp_path / "binary.csv"
    path.write_bytes(b"t,p\n0,1\n\xff\xfe,2\n")
    with pytest.raises(IngestError) as info:
        ingest(TickFileSpec(path=str(path)))
    assert info.value.code == "parse-error"
    assert main(["sigplot", str(path)]) == 1
    err = capsys.readouterr().err
    assert err.startswith("hy-leadlag: error[parse-error]: ")
    assert err.count("\n") == 1


def test_unit_to_ticks():
    assert unit_to_ticks("1.5", "milliseconds", 1_000_000) == 1_500
    assert unit_to_ticks("250", "nanoseconds", 1_000_000_000) == 250
    with pytest.raises(InvalidInputError) as info:
        unit_to_ticks("250", "nanoseconds", 1_000_000)
    assert info.value.code == "precision-loss"


def test_simulate_round_trip(simulated):
    params = BachelierParams.from_units(theta="0.1", T=1, delta=1, rho=0.75)
    every_ms = Synchronous(period=1_000)
    x, y = sample(simulate_bachelier(params, 4), every_ms, every_ms, 4)
    for path, expected in zip(simulated, (x, y)):
        series = ingest(TickFileSpec(path=path))
        assert np.array_equal(series.times, expected.times)
        assert np.array_equal(series.prices, expected.prices)


def test_simulated_file_layout(simulated):
    with open(simulated[0]) as f:
        header, rows = _csv_rows(f.read())
    assert header == "time,price"
    assert rows[0][0] == "0"
    assert rows[100][0] == "0.1"
    assert read_config(simulated[0])["command"] == "simulate"


def test_curve_rows(simulated, tmp_path, capsys):
    x_path, y_path = simulated
    argv = ["curve", x_path, y_path, "--grid-min=-0.003", "--grid-max=0.003", "--grid-mesh=0.001"]
    assert main(argv) == 0
    header, rows = _csv_rows(capsys.readouterr().out)
    assert header == "shift,contrast"
    expected = ["-0.003", "-0.002", "-0.001", "0", "0.001", "0.002", "0.003"]
    assert [row[0] for row in rows] == expected
    assert all(float(row[1]) == float(row[1]) for row in rows)


def test_estimate_identical_series_is_zero(simulated, capsys):
    x_path, _ = simulated
    grid = ["--grid-min=-0.002", "--grid-max=0.002", "--grid-mesh=0.001"]
    argv = ["estimate", x_path, x_path] + grid
    assert main(argv) == 0
    header, rows = _csv_rows(capsys.readouterr().out)
    assert header == "theta_hat,contrast_at_max,mesh_delta_n,grid_size,horizon,leader"
    assert rows[0][0] == "0"
    assert rows[0][2] == "0.001"
    assert rows[0][3] == "5"
    assert rows[0][4] == "1.998"
    assert rows[0][5] == "none"


def test_estimate_names_the_leader(simulated, capsys):
    x_path, y_path = simulated
    argv = ["estimate", x_path, y_path, "--grid-min=0.05", "--grid-max=0.15", "--grid-mesh=0.001"]
    assert main(argv + ["--format", "json"]) == 0
    document = json.loads(capsys.readouterr().out)
    row = document["rows"][0]
    assert row["theta_hat"] == "0.1"
    assert row["leader"] == "bund"
    assert document["config"]["command"] == "estimate"


@pytest.mark.parametrize("fmt", ["csv", "json"])
def test_rerun_reproduces_bytes(simulated, tmp_path, fmt):
    x_path, y_path = simulated
    first = tmp_path / f"curve.{fmt}"
    argv = ["curve", x_path, y_path, "--grid-min=0.09", "--grid-max=0.11", "--grid-mesh=0.002"]
    assert main(argv + ["--format", fmt, "--out", str(first)]) == 0
    second = tmp_path / f"again.{fmt}"
    assert main(["rerun", str(first), "--out", str(second)]) == 0
    assert first.read_bytes() == second.read_bytes()


def test_json_times_are_exact_decimals(simulated, tmp_path):
    x_path, y_path = simulated
    argv = ["curve", x_path, y_path, "--grid-min=0.099", "--grid-max=0.101", "--grid-mesh=0.001"]
    csv_out, json_out = tmp_path / "c.csv", tmp_path / "c.json"
    assert main(argv + ["--out", str(csv_out), "--no-zero"]) == 0
    assert main(argv + ["--out", str(json_out), "--no-zero", "--format", "json"]) == 0
    _, rows = _csv_rows(csv_out.read_text())
    document = json.loads(json_out.read_text())
    assert [row["shift"] for row in document["rows"]] == [row[0] for row in rows]
    assert [row["shift"] for row in document["rows"]] == ["0.099", "0.1", "0.101"]
    assert document["summary"]["horizon"] == "1.899"


def test_rerun_simulate(simulated, tmp_path):
    x_path, y_path = simulated
    new_x, new_y = tmp_path / "x2.csv", tmp_path / "y2.csv"
    assert main(["rerun", x_path, "--out-x", str(new_x), "--out-y", str(new_y)]) == 0
    assert new_x.read_bytes() == open(x_path, "rb").read()
    assert new_y.read_bytes() == open(y_path, "rb").read()


def test_rerun_simulate_needs_targets(simulated, capsys):
    assert main(["rerun", simulated[0]]) == 1
    assert "error[invalid-input]" in capsys.readouterr().err


def test_signature_then_two_stage_curve(simulated, tmp_path, capsys):
    x_path, y_path = simulated
    assert main(["sigplot", x_path, "--ks", "1,2,5"]) == 0
    header, rows = _csv_rows(capsys.readouterr().out)
    assert header == "k,realized_vol"
    assert [row[0] for row in rows] == ["1", "2", "5"]

    coarse = ["curve", x_path, y_path, "--grid-min=-0.3", "--grid-max=0.3", "--grid-mesh=0.05"]
    assert main(coarse + ["--format", "json"]) == 0
    peak = float(json.loads(capsys.readouterr().out)["summary"]["argmax_shift"])
    assert peak == pytest.approx(0.1)

    fine = [
        "curve",
        x_path,
        y_path,
        f"--grid-min={peak - 0.01:.3f}",
        f"--grid-max={peak + 0.01:.3f}",
        "--grid-mesh=0.001",
        "--no-zero",
        "--format",
        "json",
    ]
    assert main(fine) == 0
    document = json.loads(capsys.readouterr().out)
    assert len(document["rows"]) == 21
    assert float(document["summary"]["argmax_shift"]) == pytest.approx(0.1)


def test_montecarlo_command(tmp_path):
    out = tmp_path / "hist.json"
    argv = ["montecarlo", "--runs", "5", "--half-steps", "3", "--format", "json", "--out", str(out)]
    assert main(argv) == 0
    document = json.loads(out.read_text())
    assert sum(row["count"] for row in document["rows"]) == 5
    assert document["summary"]["n_runs"] == 5
    assert document["config"]["master_seed"] == 0
    assert all(0.097 <= float(row["theta_hat"]) <= 0.103 for row in document["rows"])


def test_montecarlo_csv_header(capsys):
    assert main(["montecarlo", "--runs", "2", "--half-steps", "1", "--seed", "9"]) == 0
    header, rows = _csv_rows(capsys.readouterr().out)
    assert header == "theta_hat,count"
    assert sum(int(row[1]) for row in rows) == 2


def test_errors_are_one_line(tmp_path, capsys):
    missing = str(tmp_path / "missing.csv")
    argv = ["estimate", missing, missing, "--grid-min=0", "--grid-max=0", "--grid-mesh=0.001"]
    assert main(argv) == 1
    err = capsys.readouterr().err
    assert err.startswith("hy-leadlag: error[io-error]: ")
    assert err.count("\n") == 1


def test_validation_errors_map_to_invalid_input(tmp_path, capsys):
    outputs = ["--out-x", str(tmp_path / "a"), "--out-y", str(tmp_path / "b")]
    argv = ["simulate", "--rho", "2"] + outputs
    assert main(argv) == 1
    err = capsys.readouterr().err
    assert err.startswith("hy-leadlag: error[invalid-input]: rho")


def test_off_resolution_flag(simulated, capsys):
    x_path, y_path = simulated
    argv = ["curve", x_path, y_path, "--grid-min=0", "--grid-max=0.0000001", "--grid-mesh=0.001"]
    assert main(argv) == 1
    assert "error[precision-loss]: --grid-max" in capsys.readouterr().err


def test_usage_error_exits_2():
    with pytest.raises(SystemExit) as info:
        main(["curve"])
    assert info.value.code == 2


def test_help_states_sign_convention(capsys):
    with pytest.raises(SystemExit):
        build_parser().parse_args(["estimate", "--help"])
    text = " ".join(capsys.readouterr().out.split())
    assert "the asset in the X file leads" in text
