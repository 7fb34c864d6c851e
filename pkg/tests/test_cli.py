import json

import pytest

from freequot.cli import main
from freequot.schreier import load_graph


@pytest.fixture(scope="module")
def files(tmp_path_factory):
    d = tmp_path_factory.mktemp("cli")
    (d / "grid.rel").write_text("abAB\n")
    assert main(["build", "--rank", "2", "--relators", str(d / "grid.rel"), "--radius", "4",
                 "--out", str(d / "grid.txt")]) == 0
    assert main(["build", "--rank", "2", "--preset", "powers", "6", "--radius", "5",
                 "--out", str(d / "p6.txt")]) == 0
    assert main(["build", "--rank", "2", "--preset", "klein", "--radius", "2",
                 "--out", str(d / "klein.txt")]) == 0
    return d


def test_build_outputs(files):
    g = load_graph((files / "grid.txt").read_text())
    assert g.exactness.startswith("approx:") and g.certified_radius >= 3
    assert load_graph((files / "klein.txt").read_text()).n_vertices == 4
    head = (files / "p6.txt").read_text().splitlines()[0]
    assert head.startswith("rank 2 vertices") and head.endswith("approx:5")


def test_count_csv(files, capsys):
    assert main(["count", "--input", str(files / "grid.txt"), "--mode", "loops", "--radius", "6"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "r,count,root_or_rate"
    assert lines[5].startswith("4,9,") and lines[7].startswith("6,49,")


def test_count_json(files, capsys):
    assert main(["count", "--input", str(files / "grid.txt"), "--mode", "balls", "--radius", "3",
                 "--format", "json"]) == 0
    rows = json.loads(capsys.readouterr().out)["rows"]
    assert [r["count"] for r in rows] == [1, 5, 13, 25]


@pytest.mark.parametrize("method", ["power", "return", "rayleigh"])
def test_spectral(files, capsys, method):
    assert main(["spectral", "--input", str(files / "klein.txt" if method == "power" else files / "p6.txt"),
                 "--method", method]) == 0
    out = json.loads(capsys.readouterr().out)
    assert set(out) >= {"rho_lower", "rho_upper", "lambda0_lower", "lambda0_upper", "method_tags"}
    if method == "power":
        assert out["rho_lower"] == pytest.approx(1.0, abs=1e-9)


@pytest.mark.parametrize("op", ["core", "girth", "iso-upper", "iso-lower", "euler-check"])
def test_geometry(files, capsys, op):
    assert main(["geometry", "--input", str(files / "p6.txt"), "--op", op]) == 0
    out = json.loads(capsys.readouterr().out)
    if op == "girth":
        assert out["girth"] == 6
    if op == "iso-lower":
        assert out["lower"]["exact"] == "1/4"
    if op == "euler-check":
        assert out["euler_boundary_check"] is True


def test_planar(files, capsys):
    assert main(["planar", "--input", str(files / "grid.txt"), "--radius", "3"]) == 0
    assert json.loads(capsys.readouterr().out)["planar"] is True


def test_lab_sweep(tmp_path, capsys):
    assert main(["lab", "sweep", "--preset", "powers", "--n", "2", "--k", "4..6",
                 "--out", str(tmp_path), "--format", "json"]) == 0
    data = json.loads((tmp_path / "sweep-n2.json").read_text())
    assert [r["extras"]["k"] for r in data] == [4, 5, 6]
    assert (tmp_path / "powers-n2-k5.json").exists()


def test_lab_verify_exit_codes(files, tmp_path, capsys):
    assert main(["lab", "verify", "--input", str(files / "grid.txt"), "--samples", "20"]) == 0
    assert "PASS" in capsys.readouterr().out
    bad = (files / "klein.txt").read_text().splitlines()
    # break the involution: vertex 0 now claims a different a-neighbour
    row = next(i for i, line in enumerate(bad) if line.startswith("0 "))
    parts = bad[row].split()
    parts[1] = "2" if parts[1] != "2" else "3"
    bad[row] = " ".join(parts)
    (tmp_path / "bad.txt").write_text("\n".join(bad) + "\n")
    assert main(["lab", "verify", "--input", str(tmp_path / "bad.txt")]) == 1


def test_resource_cap_exit_code():
    assert main(["build", "--rank", "3", "--radius", "6", "--depth", "0", "--max-vertices", "500"]) == 2


def test_bad_input_exit_code(tmp_path):
    (tmp_path / "junk.txt").write_text("hello\n")
    assert main(["count", "--input", str(tmp_path / "junk.txt"), "--radius", "2"]) == 3
