import csv
import filecmp
import json
import subprocess
import sys

import numpy as np
import pytest

from malab.cli import main



def test_entire_outputs(tmp_path, capsys):
    code = main(["entire", "--p", "1", "--r-max", "20", "--out", str(tmp_path), "--plot"])
    assert code == 0
    out = capsys.readouterr().out
    assert out.startswith("name,value,target,tolerance,pass")
    summary = json.loads((tmp_path / "entire.json").read_text())
    assert set(summary) == {"config", "results", "residuals", "timings"}
    assert summary["config"]["p"] == 1.0 and summary["config"]["r_max"] == 20.0
    assert all(r["pass"] for r in summary["results"])
    with open(tmp_path / "entire.csv") as fh:
        rows = list(csv.reader(fh))
    data = np.array(rows[1:], dtype=float)
    assert data[-1, 0] == 20.0
    assert (tmp_path / "entire.svg").read_text().lstrip().startswith("<?xml")
    assert (tmp_path / "entire.wallclock.json").exists()


def test_json_stdout_format(tmp_path, capsys):
    assert main(["verify", "--n", "2", "--p", "1", "--format", "json", "--out", str(tmp_path)]) == 0
    results = json.loads(capsys.readouterr().out)
    assert results and all(r["pass"] for r in results)


def test_large_and_borderline(tmp_path):
    assert main(["large", "--p", "3", "--R", "1", "2", "--out", str(tmp_path), "--stem", "sup"]) == 0
    assert main(["large", "--p", "2", "--out", str(tmp_path), "--stem", "crit"]) == 0
    sup = json.loads((tmp_path / "sup.json").read_text())
    assert any(r["name"].startswith("alpha_fit") for r in sup["results"])


def test_barrier_command(tmp_path):
    assert main(["barrier", "--p", "0.25", "--beta", "-2", "--out", str(tmp_path)]) == 0
    assert (tmp_path / "barrier_samples.csv").exists()


@pytest.mark.parametrize("argv", [
    ["entire", "--p", "3"],
    ["entire"],
    ["large", "--p", "1"],
    ["barrier", "--p", "0.7", "--beta", "-1"],
    ["entire", "--p", "1", "--n", "1"],
    ["nonsense"],
])
def test_usage_errors_exit_2(argv, tmp_path, capsys):
    assert main(argv + ["--out", str(tmp_path)]) == 2
    line = capsys.readouterr().err.strip().splitlines()[-1]
    assert line.startswith("ERROR ")
    assert json.loads(line[6:])["kind"] == "usage"


def test_solver_failure_exit_1(tmp_path, capsys):
    assert main(["large", "--p", "3", "--R", "1e-3", "--out", str(tmp_path)]) == 1
    assert capsys.readouterr().err.startswith("FAIL ")


def test_config_file_and_override(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("p = 0.5\na0 = 2\nr-max = 30\n")
    assert main(["entire", "--config", str(cfg), "--r-max", "25", "--out", str(tmp_path)]) == 0
    config = json.loads((tmp_path / "entire.json").read_text())["config"]
    assert config["p"] == 0.5 and config["a0"] == 2.0 and config["r_max"] == 25.0


def test_config_unknown_key(tmp_path):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("p = 0.5\nwibble = 3\n")
    assert main(["entire", "--config", str(cfg), "--out", str(tmp_path)]) == 2


def test_sweep(tmp_path, capsys):
    assert main(["sweep", "entire", "--p", "0.5", "1", "--r-max", "20", "--out", str(tmp_path)]) == 0
    runs = json.loads((tmp_path / "sweep.json").read_text())["runs"]
    assert [r["exit"] for r in runs] == [0, 0]
    assert (tmp_path / "entire_n2_p0.5_a01.json").exists()


def test_determinism(tmp_path):
    argv = ["barrier", "--p", "0.125", "--beta", "-1", "--plot", "--stem", "b"]
    for d in ("a", "b"):
        assert main(argv + ["--out", str(tmp_path / d)]) == 0
    for name in ("b.csv", "b_samples.csv", "b.json", "b.svg"):
        assert filecmp.cmp(tmp_path / "a" / name, tmp_path / "b" / name, shallow=False)


def test_console_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "malab.cli", "verify", "--n", "3", "--p", "1",
                           "--out", str(tmp_path)], capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
