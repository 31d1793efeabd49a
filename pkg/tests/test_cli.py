"""Command-line front end, driven through ``main(argv)``."""

import json

import pytest

from morsematch.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


# -- complex ------------------------------------------------------------------


def test_complex(capsys):
    code, out, _ = run(capsys, "complex", "7")
    assert code == 0
    assert out.splitlines()[0] == "f = (21, 105, 105), chi = 21"
    assert run(capsys, "complex", "2")[1].splitlines()[0] == "f = (1), chi = 1"


def test_complex_out_of_range(capsys):
    code, _, err = run(capsys, "complex", "99")
    assert code == 2
    assert "usage:" in err and "99" in err


def test_max_n_flag_and_env(capsys, monkeypatch):
    assert run(capsys, "--max-n", "5", "complex", "6")[0] == 2
    monkeypatch.setenv("MORSEMATCH_MAX_N", "5")
    assert run(capsys, "complex", "6")[0] == 2
    assert run(capsys, "complex", "6", "--max-n", "6")[0] == 0


def test_complex_json_and_csv(capsys):
    data = json.loads(run(capsys, "complex", "4", "--format", "json")[1])
    assert data["graph"]["n"] == 4
    code, out, _ = run(capsys, "--format", "csv", "complex", "5", "--boundary", "1")
    lines = out.splitlines()
    assert code == 0
    assert len(lines) == 11
    assert len(lines[0].split(",")) == 16


# -- field ----------------------------------------------------------------------


def test_field(capsys):
    assert run(capsys, "field", "7", "M_star")[1].strip() == "critical: dim0=1 dim1=4 dim2=24"
    assert run(capsys, "field", "8", "M_circ")[1].strip() == "critical: dim0=1 dim2=132"


def test_field_wrong_residue(capsys):
    code, _, err = run(capsys, "field", "8", "M_star")
    assert code == 2
    assert "M_star" in err


def test_field_roundtrip(capsys, tmp_path):
    path = tmp_path / "star.json"
    assert run(capsys, "field", "7", "M_star", "--out", str(path))[0] == 0
    data = json.loads(path.read_text())
    assert data["construction"] == "M_star" and data["n"] == 7
    code, out, _ = run(capsys, "field", "--input", str(path))
    assert code == 0
    assert out.strip() == "critical: dim0=1 dim1=4 dim2=24"


def test_field_verbose_lists_critical_cells(capsys):
    out = run(capsys, "field", "7", "M_star", "-v")[1]
    lines = out.splitlines()
    assert len(lines) == 1 + 1 + 4 + 24
    assert any("[ξ]" in line for line in lines)


def test_field_rejects_bad_file(capsys, tmp_path):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"complex": {"n": 3, "edges": [[0, 1], [1, 2]]}, "pairs": [[0, 0, 5]]}))
    code, _, err = run(capsys, "field", "--input", str(path))
    assert code != 0
    assert err


# -- homology -------------------------------------------------------------------


def test_homology_modes(capsys):
    assert run(capsys, "homology", "7", "--mode", "morse:M_star")[1].strip() == "H0=Z, H1=Z_3, H2=Z^20"
    assert run(capsys, "homology", "6", "--mode", "simplicial")[1].strip() == "H0=Z, H1=Z^16"


def test_homology_check(capsys):
    code, out, _ = run(capsys, "homology", "7", "--check")
    assert code == 0
    assert out.splitlines()[-1] == "OK (morse == simplicial)"


def test_homology_json(capsys):
    data = json.loads(run(capsys, "homology", "5", "--format", "json")[1])
    (report,) = data.values()
    assert report == {"dims": [0, 1], "betti": [1, 6], "torsion": [[], []]}


# -- boundary table ---------------------------------------------------------------


def test_boundary_table(capsys):
    code, out, _ = run(capsys, "boundary-table")
    assert code == 0
    rows = out.splitlines()
    assert len(rows) == 24
    by_name = {r.split()[1]: r.split("->")[1].strip() for r in rows if r.split()[1].startswith("η")}
    assert by_name == {"η1": "-σ1 + σ4", "η2": "-σ2 + σ3", "η3": "-σ1 + σ2 + σ3"}


def test_boundary_table_check_and_csv(capsys):
    assert run(capsys, "boundary-table", "--check")[1].splitlines()[-1] == "OK (matches reference table)"
    lines = run(capsys, "--format", "csv", "boundary-table")[1].splitlines()
    assert lines[0] == "cell,matching,σ1,σ2,σ3,σ4"
    assert len(lines) == 25


def test_boundary_table_is_stable(capsys):
    assert run(capsys, "boundary-table")[1] == run(capsys, "boundary-table")[1]


# -- paths ----------------------------------------------------------------------------


@pytest.mark.parametrize("cell, count", [("eta1", 2), ("eta2", 2), ("eta3", 5)])
def test_paths_families(capsys, cell, count):
    out = run(capsys, "paths", "7", "M_star", "--cell", cell)[1]
    lines = out.splitlines()
    assert lines[0].endswith(f"{count} paths")
    assert len(lines) == 1 + count


def test_paths_empty_listing(capsys):
    out = run(capsys, "paths", "8", "M", "--dim", "2")[1]
    assert out.splitlines()
    assert all(line.endswith(": 0 paths") for line in out.splitlines())


def test_paths_dot_and_json(capsys):
    dot = run(capsys, "paths", "7", "M_star", "--cell", "eta1", "--format", "dot")[1]
    assert dot.startswith('digraph "η1"')
    assert "style=bold" in dot
    data = json.loads(run(capsys, "paths", "7", "M_star", "--cell", "eta3", "--format", "json")[1])
    assert data[0]["label"] == "η3"
    assert len(data[0]["paths"]) == 5


# -- cancel -----------------------------------------------------------------------------


@pytest.fixture
def star_file(capsys, tmp_path):
    path = tmp_path / "star.json"
    main(["field", "7", "M_star", "--out", str(path)])
    capsys.readouterr()
    return path


def test_cancel(capsys, star_file, tmp_path):
    out_path = tmp_path / "dd.json"
    code, out, _ = run(capsys, "cancel", str(star_file), "--pair", "eta1", "sigma4",
                       "--pair", "eta2", "sigma3", "--out", str(out_path))
    assert code == 0
    assert "counts (1, 2, 22)" in out
    assert json.loads(out_path.read_text())["construction"] == "M_double_star"
    assert run(capsys, "homology", "--input", str(out_path))[1].strip() == "H0=Z, H1=Z_3, H2=Z^20"


def test_cancel_rejected(capsys, star_file):
    code, _, err = run(capsys, "cancel", str(star_file), "--pair", "eta1", "sigma3")
    assert code == 1
    assert "0 paths" in err


def test_cancel_nothing(capsys, star_file, tmp_path):
    out_path = tmp_path / "same.json"
    code, out, _ = run(capsys, "cancel", str(star_file), "--out", str(out_path))
    assert code == 0
    assert "counts (1, 4, 24)" in out
    assert json.loads(out_path.read_text())["pairs"] == json.loads(star_file.read_text())["pairs"]


def test_cancel_by_index(capsys):
    code, out, _ = run(capsys, "cancel", "--build", "7", "M_star", "--pair", "2:97", "sigma4",
                       "--pair", "eta2", "sigma3")
    assert code == 0
    assert "counts (1, 2, 22)" in out


def test_unknown_alias(capsys, star_file):
    assert run(capsys, "cancel", str(star_file), "--pair", "eta9", "sigma3")[0] == 2


# -- selftest -------------------------------------------------------------------------------


def test_selftest_subset(capsys):
    code, out, _ = run(capsys, "selftest", "--only", "2,4")
    assert code == 0
    lines = out.splitlines()
    assert lines[0].startswith("[PASS]  2")
    assert lines[1].startswith("[PASS]  4")
    assert lines[-1] == "2/2 criteria passed"
