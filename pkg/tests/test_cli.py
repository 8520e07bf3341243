import json
import subprocess
import sys

import pytest

from legkit import catalog
from legkit.cli import main
from legkit.varieties import ParamVariety


def run(capsys, *argv):
    code = main(list(argv))
    return code, json.loads(capsys.readouterr().out)


def test_check_toric(capsys):
    code, rep = run(capsys, "check", "--catalog", "toric-1,1,1", "--samples", "10")
    assert code == 0 and rep["ok"] and rep["lagrangian"] == [True] * 10


def test_check_control_fails_naming_pair(capsys):
    code, rep = run(capsys, "check", "--catalog", "rnc-control", "--samples", "3")
    assert code == 1 and rep["reason"] == "OmegaNonzero"
    assert rep["failures"][0]["pair"] == [0, 1]


def test_usage_errors_exit_2(capsys, tmp_path):
    code, rep = run(capsys, "check", "--catalog", "nope")
    assert code == 2 and rep["kind"] == "InputError"
    code, _ = run(capsys, "check")
    assert code == 2
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    code, _ = run(capsys, "check", "--spec", str(bad))
    assert code == 2
    with pytest.raises(SystemExit) as exc:
        main(["matpair", "check"])
    assert exc.value.code == 2


def test_toric_classify(capsys):
    code, rep = run(capsys, "toric", "classify", "--dim", "2", "--max-weight", "12")
    assert code == 0 and rep["tuples"] == [[2, 1, 1], [1, 1, 1]]


def test_toric_build_check(capsys):
    code, rep = run(capsys, "toric", "build", "--weights", "2,1,1", "--check", "--samples", "3")
    assert code == 0 and rep["check"]["verdict"]


def test_invalid_weights(capsys):
    code, _ = run(capsys, "toric", "build", "--weights", "2,2")
    assert code != 0


def test_matpair_commands(capsys):
    code, rep = run(capsys, "matpair", "check", "--m", "3", "--samples", "2")
    assert code == 0 and rep["ok"]
    code, rep = run(capsys, "matpair", "check", "--m", "3", "--what", "xdeg:1", "--samples", "2")
    assert code == 0 and rep["smooth_signal"] is False and rep["expected_smooth"] is False
    code, rep = run(capsys, "matpair", "s6", "--trials", "3")
    assert code == 0 and rep["y_quadrics"] == 30
    code, rep = run(capsys, "matpair", "probe", "--m", "5", "--k", "1")
    assert code == 0 and rep["in_orbit"]
    code, _ = run(capsys, "matpair", "probe", "--m", "3", "--k", "0")
    assert code == 2


def test_reduce_and_extend(capsys):
    code, rep = run(capsys, "reduce", "--catalog", "toric-1,1,1", "--samples", "3", "--secant-trials", "5")
    assert code == 0 and rep["reduction"]["max_residual"] < 1e-8 and rep["secant"]["failures"] == 0
    code, rep = run(capsys, "extend", "--fixture", "conic", "--samples", "4")
    assert code == 0 and rep["qw_identity"]


def test_extend_without_parametrization(capsys, tmp_path):
    f = tmp_path / "f.json"
    terms = [{"exp": [1, 0, 1], "coef": "1"}, {"exp": [0, 2, 0], "coef": "-1"}]
    f.write_text(json.dumps({"nvars": 3, "terms": terms}))
    code, rep = run(capsys, "extend", "--hypersurface", str(f))
    assert code == 2 and rep["kind"] == "NoParametrization"
    f.write_text(json.dumps({"nvars": 3, "terms": [[[1, 0, 1], "1"]]}))
    code, rep = run(capsys, "extend", "--hypersurface", str(f))
    assert code == 2 and rep["kind"] == "InputError"


def test_join_from_file(capsys, tmp_path):
    path = tmp_path / "x.json"
    path.write_text(json.dumps(catalog.get("toric-2,1,1").to_json()))
    code, rep = run(capsys, "join", "--a", str(path), "--b", "toric-1,1,1", "--samples", "2")
    assert code == 0 and rep["nondegeneracy_rank"] == 12


def test_catalog_list(capsys):
    code, rep = run(capsys, "catalog", "list")
    names = [e["name"] for e in rep["entries"]]
    assert code == 0 and "xinv-3" in names and "rnc-control" in names


def test_json_file_matches_stdout(capsys, tmp_path):
    out = tmp_path / "r.json"
    code = main(["ideal", "--catalog", "toric-2,1,1", "--json", str(out)])
    printed = capsys.readouterr().out
    assert code == 0 and out.read_text() == printed
    assert json.loads(printed)["i2_dim"] == 6


def test_variety_json_roundtrip_through_cli(capsys, tmp_path):
    path = tmp_path / "v.json"
    path.write_text(json.dumps(catalog.get("segre-p1p1p1").to_json()))
    code, rep = run(capsys, "stabilizer", "--spec", str(path))
    assert code == 0 and rep["dim"] == 10
    assert ParamVariety.from_json(json.loads(path.read_text())).label == "segre-p1p1p1"


def test_binary_output_is_deterministic():
    cmd = [sys.executable, "-m", "legkit", "check", "--catalog", "xinv-3", "--samples", "4", "--seed", "5"]
    a = subprocess.run(cmd, capture_output=True, check=True).stdout
    b = subprocess.run(cmd, capture_output=True, check=True).stdout
    assert a == b and json.loads(a)["ok"]
