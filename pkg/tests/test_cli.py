import json
import math

import numpy as np
import pytest

from genharnack.cli import main
from genharnack.grid import GridFunction
from genharnack.serialization import loads


def run_cli(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_harnack_passes(capsys):
    code, out, _ = run_cli(capsys, "harnack", "--drift", "homogeneous", "--m", "1", "--M", "2.718281828459045")
    data = loads(out)
    assert code == 0
    assert data["experiment"] == "harnack" and data["passed"]
    assert data["harnack"]["integral_value"] == pytest.approx(0.5, rel=1e-12)
    assert data["harnack"]["m"] == {"log": 0.0}


def test_drift_check_and_osgood(capsys):
    code, out, _ = run_cli(capsys, "drift-check")
    assert code == 0 and loads(out)["experiment"] == "drift-check"
    code, out, _ = run_cli(capsys, "osgood", "--drift", '{"kind": "power", "alpha": 0.5}')
    assert loads(out)["experiment"] == "osgood"


def test_extremal_writes_table(capsys, tmp_path):
    code, out, _ = run_cli(capsys, "extremal1d", "--k", "3", "--nodes", "101", "--out", str(tmp_path))
    assert code == 0
    assert loads(out)["sharpness"]["integral_value"] == pytest.approx(2.0, abs=1e-6)
    header = (tmp_path / "extremal.csv").read_text().splitlines()[0]
    assert header == "x,log_u,log_u_prime,ratio"
    assert (tmp_path / "summary.json").read_text() == out


def test_run_config(capsys, tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"experiment": "sharpness", "params": {"k": 3.0}}))
    code, out, _ = run_cli(capsys, "run", "--config", str(cfg))
    assert code == 0
    assert loads(out)["sharpness"]["integral_value"] == pytest.approx(2.0, abs=1e-6)


def test_output_is_deterministic(capsys, tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"experiment": "barrier", "drift": {"kind": "log_linear", "c": 1.0}}))
    first = run_cli(capsys, "run", "--config", str(cfg))
    second = run_cli(capsys, "run", "--config", str(cfg))
    assert first[0] == 0 and first[1] == second[1]


@pytest.mark.parametrize("body", ["{}", '{"experiment": "harnack", "extra": 1}',
                                  '{"experiment": "harnack", "tolerances": {"rel": -1}}', "not json"])
def test_config_errors_exit_2(capsys, tmp_path, body):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(body)
    assert run_cli(capsys, "run", "--config", str(cfg))[0] == 2


def test_bad_arguments_exit_2(capsys):
    assert run_cli(capsys, "harnack", "--m", "2", "--M", "1")[0] == 2
    assert run_cli(capsys, "harnack", "--drift", "power", "--m", "1", "--M", "2")[0] == 2
    with pytest.raises(SystemExit) as info:
        main(["harnack", "--R", "abc"])
    assert info.value.code == 2


def test_assertion_failure_exits_3(capsys):
    code, out, _ = run_cli(capsys, "barrier", "--r0", "1")
    assert code == 3
    assert not loads(out)["passed"]
    assert run_cli(capsys, "barrier", "--drift", '{"kind": "power", "alpha": 2}')[0] == 3


def test_numeric_failure_exits_4(capsys):
    # u' = u^2 from u(0) = 1 blows up at x = 1 inside the domain
    code, _, err = run_cli(capsys, "extremal1d", "--drift", '{"kind": "power", "alpha": 2}', "--k", "1")
    assert code == 4
    assert "numerical failure" in err


def test_levelsets_from_csv(capsys, tmp_path):
    sol = tmp_path / "u.csv"
    GridFunction.from_function(lambda X, Y: 0.1 + X**2 + Y**2, -2.0, 2.0, 41, dim=2).save_csv(sol)
    code, out, _ = run_cli(capsys, "levelsets", "--solution", str(sol), "--L", "2", "--k-max", "6",
                           "--out", str(tmp_path / "o"))
    assert code == 0
    assert loads(out)["levelsets"]["nested"]
    assert (tmp_path / "o" / "levelsets.csv").exists()


def test_levelsets_zero_infimum_exits_2(capsys, tmp_path):
    sol = tmp_path / "u.csv"
    GridFunction.from_function(np.abs, -2.0, 2.0, 41).save_csv(sol)
    assert run_cli(capsys, "levelsets", "--solution", str(sol))[0] == 2
    assert run_cli(capsys, "levelsets", "--solution", str(tmp_path / "missing.csv"))[0] == 2


def test_px_subcommands(capsys, tmp_path):
    code, out, _ = run_cli(capsys, "px", "solve", "--profile", '{"kind": "constant", "value": 2}', "--ua", "0",
                           "--ub", "1", "--out", str(tmp_path))
    assert code == 0
    assert loads(out)["flux"] == pytest.approx(1.0)
    assert (tmp_path / "px_solution.csv").exists()
    code, out, _ = run_cli(capsys, "px", "inverse", "--k", "3", "--h", "0.002")
    assert code == 0 and loads(out)["max_relative_residual"] <= 1e-6
    code, out, _ = run_cli(capsys, "px", "harnack", "--log-m", str(-math.e**3), "--log-M", str(-math.e))
    assert code == 0
    assert loads(out)["px_harnack"]["value"] == pytest.approx(1.7353257, rel=1e-7)


def test_suite_subset(capsys):
    code, out, err = run_cli(capsys, "suite", "--criteria", "1", "6")
    assert code == 0
    assert [c["number"] for c in loads(out)["criteria"]] == [1, 6]
    assert "criterion  1 [PASS" in err
