import csv
import json

import numpy as np
import pytest

from cmclab import cli, load_field


def _rows(path):
    lines = path.read_text().splitlines()
    assert lines[0] == cli.CSV_SCHEMA or lines[0] == cli.SWEEP_SCHEMA
    return list(csv.reader(lines[1:]))


def test_solve_writes_field_and_diagnostics(tmp_path):
    out = tmp_path / "run"
    code = cli.main(["solve", "--H", "-0.5", "--grid", "32x64", "--out", str(out)])
    assert code == cli.EXIT_OK
    field = load_field(out / "field_32x64.txt")
    assert field.values.min() > 0
    diag = json.loads((out / "solve_diagnostics.json").read_text())
    assert diag["diagnostics"][0]["converged"]
    assert diag["metadata"]["tool_version"]


def test_solve_out_of_range_writes_nothing(tmp_path):
    out = tmp_path / "run"
    assert cli.main(["solve", "--H", "-1.05", "--out", str(out)]) == cli.EXIT_H_OUT_OF_RANGE
    assert not out.exists()


def test_solve_minimal(tmp_path):
    out = tmp_path / "run"
    assert cli.main(["solve", "--H", "0", "--grid", "16x32", "--out", str(out)]) == cli.EXIT_OK
    assert np.all(load_field(out / "field_16x32.txt").values == 0)
    diag = json.loads((out / "solve_diagnostics.json").read_text())
    assert diag["diagnostics"][0]["newton_iterations"] == 0


def test_verify_exact_ladder_has_orders(tmp_path):
    out = tmp_path / "v"
    code = cli.main(["verify", "--source", "exact", "--H", "-0.5", "--grid", "32x64",
                     "--grid", "64x128", "--grid", "128x256", "--out", str(out)])
    assert code == cli.EXIT_OK
    rows = _rows(out / "report.csv")
    assert rows[0] == cli.CSV_COLUMNS
    jac = [r for r in rows[1:] if r[0] == "check_jacobi"]
    assert len(jac) == 3 and jac[0][6] == "" and float(jac[1][6]) >= 1


def test_verify_flux_on_plane(tmp_path):
    out = tmp_path / "v"
    code = cli.main(["verify", "--source", "exact", "--H", "0", "--grid", "32x64",
                     "--checks", "check_flux", "--out", str(out), "--format", "csv",
                     "--format", "json"])
    assert code == cli.EXIT_OK
    rows = _rows(out / "report.csv")[1:]
    assert len(rows) == 1 and float(rows[0][4]) <= 1e-12 and rows[0][7] == "true"
    assert json.loads((out / "report.json").read_text())["reports"][0]["pass"]


def test_unknown_check(tmp_path, capsys):
    code = cli.main(["verify", "--checks", "check_foo", "--out", str(tmp_path)])
    assert code == cli.EXIT_CONFIG
    assert "check_foo" in capsys.readouterr().err


def test_verify_from_files(tmp_path):
    cli.main(["solve", "--H", "-0.25", "--grid", "16x32", "--out", str(tmp_path)])
    code = cli.main(["verify", "--source", "files", "--H", "-0.25", "--grid", "16x32",
                     "--field", str(tmp_path / "field_16x32.txt"), "--checks", "check_flux",
                     "--out", str(tmp_path / "v")])
    assert code == cli.EXIT_OK
    assert cli.main(["verify", "--source", "files", "--grid", "16x32",
                     "--field", str(tmp_path / "missing.txt"),
                     "--out", str(tmp_path / "v")]) == cli.EXIT_IO


def test_config_file_and_set(tmp_path):
    conf = tmp_path / "exp.conf"
    conf.write_text("# experiment\nr = 1\nH = -0.25\ngrid = 16x32\nchecks = check_flux\n"
                    f"out = {tmp_path / 'o'}\nsource = exact\n")
    assert cli.main(["verify", "--config", str(conf), "--set", "H=-0.5"]) == cli.EXIT_OK
    rows = _rows(tmp_path / "o" / "report.csv")[1:]
    assert float(rows[0][3]) == pytest.approx(np.pi)
    assert cli.main(["verify", "--config", str(conf), "--set", "bogus=1"]) == cli.EXIT_CONFIG
    assert cli.main(["verify", "--config", str(conf), "--grid", "16x31"]) == cli.EXIT_CONFIG
    assert cli.main(["verify", "--config", str(conf), "--set", "solver.damping=2"]) == cli.EXIT_CONFIG


def test_sweep_validation(tmp_path, capsys):
    assert cli.main(["sweep", "--out", str(tmp_path)]) == cli.EXIT_CONFIG
    assert "empty sweep" in capsys.readouterr().err
    out = tmp_path / "s"
    code = cli.main(["sweep", "--H-list=-0.25,-1.05", "--out", str(out)])
    assert code == cli.EXIT_H_OUT_OF_RANGE
    assert not out.exists()


def test_sweep_small(tmp_path):
    out = tmp_path / "s"
    code = cli.main(["sweep", "--H-list=-0.25,-0.5", "--grid", "32x64", "--out", str(out)])
    assert code == cli.EXIT_OK
    rows = _rows(out / "sweep.csv")
    assert rows[0] == cli.SWEEP_COLUMNS and len(rows) == 3


def test_verify_is_deterministic(tmp_path):
    args = ["verify", "--source", "solve", "--H", "-0.5", "--grid", "16x32",
            "--grid", "32x64", "--format", "csv", "--format", "json"]
    cli.main(args + ["--out", str(tmp_path / "a")])
    cli.main(args + ["--out", str(tmp_path / "b")])
    a = (tmp_path / "a" / "report.csv").read_text()
    b = (tmp_path / "b" / "report.csv").read_text()
    assert a == b
    ja = json.loads((tmp_path / "a" / "report.json").read_text())
    jb = json.loads((tmp_path / "b" / "report.json").read_text())
    assert ja["reports"] == jb["reports"]
