import json
import subprocess
import sys

import pytest

from linematch.cli import main


def cli(*args):
    return subprocess.run([sys.executable, "-m", "linematch", *args], capture_output=True,
                          text=True)


@pytest.fixture
def instance_file(tmp_path):
    path = tmp_path / "inst.json"
    path.write_text(json.dumps({"servers": [0, 4, 11, 31], "requests": [4, 4, 4]}))
    return path


def test_run_json_and_csv(instance_file, capsys):
    assert main(["run", str(instance_file), "--algo", "dh", "--seed", "3"]) == 0
    data = json.loads(capsys.readouterr().out)
    assert data["algorithm"] == "dh" and len(data["steps"]) == 3
    assert main(["run", str(instance_file), "--format", "csv"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0].startswith("t,request,case") and len(lines) == 4


def test_run_with_reduction(instance_file, capsys):
    assert main(["run", str(instance_file), "--reduction", "snap"]) == 0
    assert all(json.loads(capsys.readouterr().out)["checks"].values())


def test_gen_then_run(tmp_path, capsys):
    out = tmp_path / "g.json"
    assert main(["gen", "--kind", "geometric", "--n", "6", "--seed", "2", "-o", str(out)]) == 0
    assert main(["run", str(out), "--strict"]) == 0
    assert json.loads(capsys.readouterr().out)["opt"] >= 0


def test_strict_rejects_off_server_request(tmp_path, capsys):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"servers": [0, 4], "requests": [1]}))
    assert main(["run", str(path), "--strict"]) == 2
    assert "not at a server" in capsys.readouterr().err


def test_counterexample(capsys):
    assert main(["counterexample"]) == 0
    data = json.loads(capsys.readouterr().out)
    assert data["extra"]["pseudo_distance"]["p_sim_r2_to_s3"] == "4/11"


def test_sweep_flags_and_config(tmp_path, capsys):
    assert main(["sweep", "--generator", "clustered", "--n", "8", "--trials", "2",
                 "--algo", "greedy", "mdh", "--format", "csv"]) == 0
    assert len(capsys.readouterr().out.splitlines()) == 5
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"generator": "uniform", "sizes": [6], "trials": 1}))
    assert main(["sweep", str(cfg)]) == 0
    assert json.loads(capsys.readouterr().out)["config"]["sizes"] == [6]


def test_verify_quick_subprocess():
    res = cli("verify", "--quick")
    assert res.returncode == 0, res.stderr
    assert all(r["passed"] for r in json.loads(res.stdout))


def test_bad_arguments_exit_nonzero(instance_file):
    assert cli("run", str(instance_file), "--algo", "nope").returncode == 2
    assert cli("run", "/nonexistent.json").returncode == 2
