import csv
import io
import json

import numpy as np
import pytest

from fsaism.cli import SCHEMA_VERSION, format_csv, main, run_bench
from fsaism.mmio import read_matrix_market


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def lattice(tmp_path, capsys):
    path = tmp_path / "lattice.mtx"
    code, out, _ = run(capsys, "generate", "lattice2d", "nx=11", "ny=11", "-o", path)
    assert code == 0 and json.loads(out)["nnz"] == 441
    return path


def test_generate_writes_matrix(tmp_path, capsys):
    path = tmp_path / "bd.mtx"
    code, out, _ = run(capsys, "generate", "birth_death", "n=12", "lam=2", "mu=1", "-o", path)
    assert code == 0 and json.loads(out)["n"] == 12
    assert read_matrix_market(path).n == 12


def test_classify(lattice, tmp_path, capsys):
    code, out, _ = run(capsys, "classify", lattice)
    rep = json.loads(out)
    assert code == 0 and rep["verdict"] == "SingularIrreducibleM"
    assert rep["schema_version"] == SCHEMA_VERSION
    bad = tmp_path / "bad.mtx"
    bad.write_text("%%MatrixMarket matrix coordinate real general\n2 2 4\n1 1 1\n1 2 -2\n2 1 -2\n2 2 1\n")
    code, out, _ = run(capsys, "classify", bad)
    assert code == 0 and json.loads(out)["verdict"] == "NotM"


def test_solve_none_vs_matrix(lattice, capsys):
    rows = {}
    for kind in ("none", "matrix"):
        code, out, _ = run(capsys, "solve", lattice, "--pattern", kind, "--seed", 3)
        assert code == 0
        rows[kind] = json.loads(out)
    assert rows["none"]["converged"] and rows["matrix"]["converged"]
    assert rows["matrix"]["iterations"] < rows["none"]["iterations"]
    assert rows["matrix"]["final_error"] <= 1e-11


def test_solve_seed_from_environment(lattice, capsys, monkeypatch):
    monkeypatch.setenv("FSAI_SEED", "4")
    _, env_out, _ = run(capsys, "solve", lattice)
    _, flag_out, _ = run(capsys, "solve", lattice, "--seed", 4)
    assert env_out == flag_out


def test_precondition_band_support(lattice, tmp_path, capsys):
    L_path, U_path, d_path = tmp_path / "L.mtx", tmp_path / "U.mtx", tmp_path / "d.txt"
    code, out, _ = run(capsys, "precondition", lattice, "--pattern", "band:5", "-o", L_path, U_path, d_path)
    rep = json.loads(out)
    assert code == 0 and rep["pattern_violations"] == [] and rep["d_min"] > 0
    L, U = read_matrix_market(L_path), read_matrix_market(U_path)
    n = L.n
    for i, j, _ in L.to_triplets():
        assert 0 <= i - j <= 5 and (i, j) != (n - 1, n - 2)
    for i, j, _ in U.to_triplets():
        assert 0 <= j - i <= 5 and (i, j) != (n - 2, n - 1)
    assert len(np.loadtxt(d_path)) == n


def test_precondition_pattern_file(tmp_path, capsys):
    mtx = tmp_path / "a.mtx"
    mtx.write_text("%%MatrixMarket matrix coordinate real general\n2 2 4\n1 1 3\n1 2 -3\n2 1 -3\n2 2 3\n")
    pats = tmp_path / "p.json"
    pats.write_text(json.dumps({"lower": [[0, 0], [1, 1]], "upper": [[0, 0], [1, 1]]}))
    code, out, _ = run(capsys, "precondition", mtx, "--pattern-file", pats)
    assert code == 0 and json.loads(out)["d_min"] == pytest.approx(1 / 3)
    # the forbidden pair reaches the local solve and breaks it down
    pats.write_text(json.dumps({"lower": [[0, 0], [1, 0], [1, 1]], "upper": [[0, 0], [1, 1]]}))
    code, _, err = run(capsys, "precondition", mtx, "--pattern-file", pats)
    assert code == 1 and json.loads(err)["error"] == "SingularLocalSystem"


def test_inverse(tmp_path, capsys):
    mtx = tmp_path / "b.mtx"
    run(capsys, "generate", "birth_death", "n=8", "lam=1.5", "mu=1", "-o", mtx)
    code, out, _ = run(capsys, "inverse", mtx, "-o", tmp_path / "x.mtx")
    rep = json.loads(out)
    assert code == 0 and rep["relative"]["ax1"] <= 1e-10 and rep["relative"]["ax2"] <= 1e-10
    assert read_matrix_market(tmp_path / "x.mtx").n == 8


def test_errors_are_json_with_exit_one(tmp_path, capsys):
    code, _, err = run(capsys, "classify", tmp_path / "missing.mtx")
    assert code == 1 and "error" in json.loads(err)
    bad = tmp_path / "bad.mtx"
    bad.write_text("%%MatrixMarket matrix coordinate real general\n2 2 1\n1 q 1\n")
    code, _, err = run(capsys, "classify", bad)
    assert code == 1 and json.loads(err)["error"] == "ParseError"
    code, _, err = run(capsys, "generate", "ncd", "coupling=-1", "-o", tmp_path / "n.mtx")
    assert code == 1 and json.loads(err)["error"] == "InvalidParam"


def test_bench_json_and_csv(tmp_path, capsys):
    code, out, _ = run(capsys, "bench", "--suite", "small", "--format", "json", "--max-iters", 100)
    table = json.loads(out)
    assert code == 0 and len(table["rows"]) == 12
    out_csv = tmp_path / "b.csv"
    run(capsys, "bench", "--suite", "small", "--max-iters", 100, "-o", out_csv)
    rows = list(csv.DictReader(io.StringIO(out_csv.read_text())))
    assert [(r["matrix"], r["pattern"]) for r in rows] == \
        [(r["matrix"], r["pattern"]) for r in table["rows"]]


def test_bench_workers_match_serial():
    serial = format_csv(run_bench("small", 2, max_iters=100))
    assert format_csv(run_bench("small", 2, max_iters=100, workers=4)) == serial
