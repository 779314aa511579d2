import csv
import io
import json
import math
import subprocess
import sys

import pytest

from hdchain.cli import DEFAULT_SEED, main
from hdchain.harmonic import PI2_OVER_6


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def parse_csv(text):
    lines = text.splitlines()
    assert lines[0].startswith("# hdchain ")
    assert lines[1].startswith("# config ")
    config = json.loads(lines[1][len("# config "):])
    rows = list(csv.DictReader(io.StringIO("\n".join(lines[2:]))))
    return config, rows


def test_exact_csv(capsys):
    code, out, _ = run(["exact", "--n", "1000", "--format", "csv"], capsys)
    assert code == 0
    config, rows = parse_csv(out)
    assert config["command"] == "exact" and config["n"] == 1000
    assert list(rows[0]) == ["i", "a_n_i", "b_i", "gap"]
    assert len(rows) == 1000
    assert [int(r["i"]) for r in rows] == list(range(1, 1001))
    assert float(rows[0]["a_n_i"]) == 1.0
    assert float(rows[1]["b_i"]) == pytest.approx(6 / math.pi ** 2, rel=1e-14)


def test_identities_json(capsys):
    code, out, _ = run(["identities", "--k", "100"], capsys)
    assert code == 0
    doc = json.loads(out)
    assert set(doc) == {"config", "results", "version"}
    res = {r["identity"]: r for r in doc["results"]}
    assert res["euler_partition_sum"]["residual"] < 1e-12
    assert abs(res["euler_partition_sum"]["value"] - PI2_OVER_6) < 1e-12
    assert res["fixed_point_max_residual"]["value"] < 1e-12
    assert res["overshoot_mass_total"]["residual"] < 1e-12


def test_limits(capsys):
    code, out, _ = run(["limits", "--i", "20"], capsys)
    doc = json.loads(out)
    assert code == 0 and len(doc["results"]) == 20
    assert max(abs(r["residual"]) for r in doc["results"]) < 1e-12


def test_simulate_reports_reference_line(capsys):
    code, out, _ = run(["simulate", "--n", "10000", "--mode", "continuous",
                        "--reps", "100000", "--seed", "42", "--workers", "4"], capsys)
    assert code == 0
    row = json.loads(out)["results"][0]
    assert row["quantity"] == "T_1"
    assert row["reference"] == pytest.approx(5.599, abs=5e-4)
    assert abs(row["mean"] - row["exact"]) <= 3 * row["std_error"]


def test_simulate_targets_and_survival(capsys):
    code, out, _ = run(["simulate", "--n", "200", "--mode", "discrete", "--reps", "20000",
                        "--targets", "2,5", "--k", "10", "--t", "0.5"], capsys)
    assert code == 0
    rows = json.loads(out)["results"]
    assert [r["quantity"] for r in rows] == ["T_1", "a_n_i", "a_n_i", "P_T_k_le_t"]
    assert rows[0]["reference"] is None
    for r in rows[1:3]:
        assert abs(r["mean"] - r["exact"]) <= 4 * r["std_error"]
    assert rows[3]["mean"] <= rows[3]["reference"] + 3 * rows[3]["std_error"]


def test_couple_and_overshoot(capsys):
    code, out, _ = run(["couple", "--x", "100", "--y", "1000", "--i", "3", "--reps", "20000"], capsys)
    assert code == 0
    rows = json.loads(out)["results"]
    assert rows[0]["exact"] <= rows[0]["mean"] + 3 * rows[0]["std_error"]
    assert rows[1]["mean"] <= rows[2]["mean"]
    code, out, _ = run(["overshoot", "--x", "100", "--y", "10000", "--reps", "20000"], capsys)
    assert code == 0 and json.loads(out)["results"][0]["mean"] < 3.0


@pytest.mark.parametrize("argv", [
    ["exact"],
    ["exact", "--n", "0"],
    ["simulate", "--n", "10", "--k", "3"],
    ["simulate", "--n", "10", "--mode", "sideways"],
    ["couple", "--x", "10", "--y", "5"],
    ["couple", "--x", "5", "--y", "10", "--i", "1"],
    ["overshoot", "--x", "10", "--y", "10"],
    ["identities", "--k", "10", "--cutoff", "11"],
    ["simulate", "--n", "10", "--reps", "0"],
])
def test_usage_errors_exit_2(argv, capsys):
    with pytest.raises(SystemExit) as exc:
        main(argv)
    assert exc.value.code == 2
    assert capsys.readouterr().err


def test_domain_error_exit_2(capsys):
    code, _, err = run(["simulate", "--n", "10", "--k", "20", "--t", "1"], capsys)
    assert code == 2 and "error" in err


def test_capacity_exit_3(capsys):
    code, out, err = run(["exact", "--n", "50", "--table-size", "10"], capsys)
    assert code == 3 and out == "" and "capacity" in err


@pytest.mark.parametrize("command", [
    ["simulate", "--n", "3000", "--reps", "20000", "--targets", "2,3"],
    ["couple", "--x", "50", "--y", "800", "--reps", "20000"],
    ["overshoot", "--x", "30", "--y", "3000", "--reps", "20000"],
])
def test_byte_identical_across_workers(command, capsys):
    reports = {run(command + ["--workers", str(w)], capsys)[1] for w in (1, 1, 3, 8)}
    assert len(reports) == 1


def test_csv_and_json_hold_the_same_numbers(capsys):
    base = ["simulate", "--n", "500", "--reps", "5000", "--targets", "2,7,100", "--k", "5", "--t", "1"]
    _, js, _ = run(base + ["--format", "json"], capsys)
    _, cs, _ = run(base + ["--format", "csv"], capsys)
    doc = json.loads(js)
    config, rows = parse_csv(cs)
    assert {k: v for k, v in config.items() if k != "format"} == {k: v for k, v in doc["config"].items() if k != "format"}
    assert len(rows) == len(doc["results"])
    for jr, cr in zip(doc["results"], rows):
        for key, value in jr.items():
            if value is None:
                assert cr[key] == ""
            elif isinstance(value, str):
                assert cr[key] == value
            else:
                assert float(cr[key]) == value


def test_config_is_embedded(capsys):
    _, out, _ = run(["overshoot", "--x", "5", "--y", "60", "--reps", "100", "--seed", "9"], capsys)
    config = json.loads(out)["config"]
    assert config == {
        "command": "overshoot", "n": None, "i": None, "k": None, "x": 5, "y": 60, "t": None,
        "cutoff": None, "targets": None, "protocol": None, "reps": 100, "seed": 9,
        "mode": "continuous", "format": "json", "table_size": 20_000,
    }


def test_seed_default_and_env_override(capsys, monkeypatch):
    argv = ["overshoot", "--x", "5", "--y", "60", "--reps", "100"]
    monkeypatch.delenv("HD_SEED", raising=False)
    _, out, _ = run(argv, capsys)
    assert json.loads(out)["config"]["seed"] == DEFAULT_SEED
    monkeypatch.setenv("HD_SEED", "1234")
    _, out, _ = run(argv, capsys)
    assert json.loads(out)["config"]["seed"] == 1234
    _, out, _ = run(argv + ["--seed", "7"], capsys)
    assert json.loads(out)["config"]["seed"] == 7


def test_out_file_matches_stdout(tmp_path, capsys):
    argv = ["limits", "--i", "5", "--format", "csv"]
    _, out, _ = run(argv, capsys)
    path = tmp_path / "r.csv"
    assert main(argv + ["--out", str(path)]) == 0
    assert path.read_bytes() == out.encode()


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "hdchain", "exact", "--n", "3", "--format", "csv"],
                          capture_output=True, text=True, check=True)
    assert proc.stdout.splitlines()[2:] == [
        "i,a_n_i,b_i,gap",
        "1,1,1,0",
        "2,0.666666666666667,0.607927101854027,0.05873956481264",
        "3,1,0.45594532639052,0.54405467360948",
    ]
