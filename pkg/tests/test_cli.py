import csv
import io
import json
import os
import subprocess
import sys

import pytest

from gvlab.cli import main, read_config
from gvlab.report import ConfigError


def _run(*args, env=None):
    full = dict(os.environ, **(env or {}))
    return subprocess.run([sys.executable, "-m", "gvlab.cli", *args], capture_output=True, text=True, env=full)


def test_list_scenarios(capsys):
    assert main(["list-scenarios"]) == 0
    names = {s["name"] for s in json.loads(capsys.readouterr().out)["scenarios"]}
    assert {"contact", "tilted", "foliation", "twisted"} <= names


def test_gv_report_fields(capsys):
    assert main(["gv", "--scenario", "contact", "--grid", "16", "--no-timestamp"]) == 0
    rep = json.loads(capsys.readouterr().out)
    assert rep["grid"] == [16, 16, 16]
    assert abs(rep["gv_direct"]) < 1e-12
    assert "timestamp" not in rep


def test_scenario_parameters_and_config_file(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# comment line\nverb = gv\nscenario = tilted_flat  # trailing\ngrid = 16,16,16\n"
                   "param.eps = 0.0\n")
    parsed = read_config(cfg)
    assert parsed["params"] == {"eps": 0.0} and parsed["grid"] == (16, 16, 16)
    assert main(["--config", str(cfg), "--no-timestamp"]) == 0
    flat = json.loads(capsys.readouterr().out)
    assert abs(flat["gv_direct"]) < 1e-12
    # flags override the file
    assert main(["--config", str(cfg), "--set", "eps=0.3", "--no-timestamp"]) == 0
    assert json.loads(capsys.readouterr().out) != flat


def test_bad_config_lines(tmp_path):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("verb gv\n")
    with pytest.raises(ConfigError):
        read_config(cfg)
    cfg.write_text("colour = red\n")
    with pytest.raises(ConfigError):
        read_config(cfg)


@pytest.mark.parametrize("args", [
    ["gv", "--scenario", "nowhere"],
    ["gv", "--checks", "no_such_check"],
    ["sweep", "--scenario", "tilted", "--axis", "grid", "--values", "16,24"],
    ["gv", "--set", "eps"],
    ["frobnicate"],
    [],
])
def test_usage_errors_exit_one(args):
    r = _run(*args)
    assert r.returncode == 1, r.stderr
    assert "Traceback" not in r.stderr


def test_failing_check_exits_two():
    r = _run("jacobi", "--grid", "24", "--no-timestamp")
    assert r.returncode == 2
    assert json.loads(r.stdout)["scenario"] == "random_quadratic_chart"


def test_sweep_csv(capsys):
    assert main(["sweep", "--scenario", "tilted", "--axis", "grid", "--values", "16,24,32"]) == 0
    rows = list(csv.DictReader(io.StringIO(capsys.readouterr().out)))
    assert [float(r["value"]) for r in rows] == [16, 24, 32]
    assert rows[0]["observed_order"] == "nan"
    assert float(rows[2]["observed_order"]) > 3


def test_output_is_byte_identical_across_thread_counts(tmp_path):
    outs = []
    for threads in ("1", "4"):
        out = tmp_path / f"rep{threads}.json"
        r = _run("variation", "--scenario", "tilted", "--grid", "16", "--no-timestamp", "--out", str(out),
                 env={"GVLAB_THREADS": threads})
        assert r.returncode == 0, r.stderr
        outs.append(out.read_bytes())
    assert outs[0] == outs[1]
