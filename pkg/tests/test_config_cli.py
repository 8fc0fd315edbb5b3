import json
import os
import subprocess
import sys

import pytest

from cascadelab.cli import main
from cascadelab.config import ConfigError, RunConfig, parse_value
from cascadelab.costs import ExponentialCost
from cascadelab.resultio import read_table
from cascadelab.welfare import FlatSubsidy


def write(tmp_path, text, name="run.toml"):
    p = tmp_path / name
    p.write_text(text)
    return p


def test_dotted_keys_and_sections(tmp_path):
    p = write(tmp_path, 'experiment = "value"\nmodel.q0 = 0.65\n[cost]\nfamily = "exponential"\nrate = 2.0\n'
                        '[subsidy]\nkind = "flat"\ns = 0.1\n')
    rc = RunConfig.from_file(p)
    assert rc.model_params().q0 == 0.65
    assert rc.cost_model() == ExponentialCost(2.0)
    assert rc.subsidy_rule() == FlatSubsidy(0.1)
    assert rc.experiment == "value"


@pytest.mark.parametrize(
    "text, key",
    [
        ("model.qq = 1", "model.qq"),
        ("model.q0 = 0.4", "model.q0"),
        ('model.q0 = "x"', "model.q0"),
        ("sim.horizon = 0", "sim.horizon"),
        ('experiment = "plot"', "experiment"),
        ('output.format = "xml"', "output.format"),
        ("seed = -1", "seed"),
        ('sim.history_file = "missing.csv"', "sim.history_file"),
    ],
)
def test_config_errors_name_the_key(tmp_path, text, key):
    p = write(tmp_path, text)
    with pytest.raises(ConfigError) as err:
        RunConfig.from_file(p).sim_config()
    assert err.value.key == key


def test_parse_value():
    assert parse_value("0.5") == 0.5
    assert parse_value("true") is True
    assert parse_value("[[1, 0], [0, 1]]") == [[1, 0], [0, 1]]
    assert parse_value("uniform") == "uniform"


def test_inline_history(tmp_path):
    rc = RunConfig.from_mapping({"sim": {"history": [[1, 0], [0, 1]]}})
    assert [(r.a, r.e) for r in rc.history()] == [(1, 0), (0, 1)]


def test_value_command(capsys):
    assert main(["value", "--LU", "0", "--LE", "0"]) == 0
    out = capsys.readouterr().out
    assert "delta_v = 0.2" in out and "case = BothSignal" in out


def test_simulate_header(tmp_path):
    out = tmp_path / "sim.csv"
    assert main(["simulate", "--reps", "2", "--horizon", "4", "--out", str(out)]) == 0
    t = read_table(out)
    assert t.columns == ["rep", "theta", "t", "a", "e", "y", "cost", "delta_v", "L_U", "L_E", "w"]
    assert len(t.rows) == 8
    assert t.metadata["seed"] == 0 and "version" in t.metadata and "model" in t.metadata["config"]


def test_exit_codes(tmp_path, capsys):
    assert main(["value", "--set", "model.bogus=1"]) == 1
    assert "model.bogus" in capsys.readouterr().err
    assert main(["breaktime", "--reps", "200", "--strict"]) == 2
    assert "scenario invalid" in capsys.readouterr().err
    assert main(["breaktime", "--reps", "100", "--set", 'sim.history=[[0, 0]]']) == 2
    assert main(["run", str(tmp_path / "none.toml")]) == 1


def test_breaktime_reports_bound(capsys):
    assert main(["breaktime", "--delta", "0.2", "--pstar", "0.9", "--reps", "2000"]) == 0
    assert "bound = 5.5556" in capsys.readouterr().out


def test_rerun_from_result_file(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert main(["benchmarks", "--reps", "50", "--seed", "4", "--out", str(a), "--format", "json"]) == 0
    assert main(["run", str(a), "--set", f'output.path="{b}"']) == 0
    assert a.read_bytes() == b.read_bytes()


def test_run_config_file(tmp_path):
    out = tmp_path / "sweep.csv"
    p = write(tmp_path, f'experiment = "sweep"\nsweep.target = "q1"\nsweep.grid = [0.6, 0.7, 0.8]\n'
                        f'output.path = "{out}"\n')
    assert main(["run", str(p)]) == 0
    t = read_table(out)
    assert t.column("delta_v") == pytest.approx([0.0, 0.1, 0.2])


@pytest.mark.parametrize("cmd", [["welfare", "--reps", "50"], ["subsidy", "--LU", "3", "--LE", "-0.5"],
                                 ["earlytable"], ["sweep", "--grid", "0.1,0.2,0.3"],
                                 ["simulate", "--reps", "2", "--mode", "imperfect", "--set", "model.rho=0.8"]])
def test_every_experiment_runs(cmd, tmp_path):
    out = tmp_path / "o.json"
    assert main(cmd + ["--out", str(out), "--format", "json"]) == 0
    doc = json.loads(out.read_text())
    assert doc["schema"] == "1" and doc["rows"]


def test_console_script_entry_point():
    r = subprocess.run([sys.executable, "-m", "cascadelab.cli", "value", "--LU", "0", "--LE", "0"],
                       capture_output=True, text=True, env=dict(os.environ))
    assert r.returncode == 0 and "BothSignal" in r.stdout
