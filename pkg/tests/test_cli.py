import json

import numpy as np

from sigapprox.cli import main


def test_norms(capsys):
    assert main(["norms"]) == 0
    assert "sup|sigma''|" in capsys.readouterr().out


def test_build_then_eval(tmp_path, capsys):
    path = tmp_path / "net.json"
    assert main(["build", "--func", "sin", "--M", "2", "--out", str(path)]) == 0
    info = json.loads(capsys.readouterr().out)
    assert info["L"] == 8 and info["W0"] == info["W0_formula"]
    pts = tmp_path / "x.csv"
    np.savetxt(pts, np.array([[0.1], [0.2]]), delimiter=",")
    assert main(["eval", "--net", str(path), "--x", str(pts)]) == 0
    vals = [float(v) for v in capsys.readouterr().out.split()]
    # q = 0 pieces are constant, so the error is about the half fine side 1/M^2
    np.testing.assert_allclose(vals, np.sin([0.1, 0.2]), atol=0.3)
    assert main(["eval", "--net", str(path), "--x", "0.1,0.2"]) == 0
    assert [float(v) for v in capsys.readouterr().out.split()] == vals


def test_verify_exit_code(tmp_path, capsys):
    assert main(["verify", "--lemma", "PoU", "--json", str(tmp_path / "r.json")]) == 0
    out = capsys.readouterr().out
    assert "PASS" in out and "FAIL" not in out
    assert json.loads((tmp_path / "r.json").read_text())["lemma_id"] == "PoU"


def test_sweep_writes_both_formats(tmp_path, capsys):
    report = tmp_path / "rate.json"
    assert main(["sweep", "--func", "sin", "--M-list", "2,3", "--grid", "50", "--report", str(report)]) == 0
    capsys.readouterr()
    assert json.loads(report.read_text())["spec"]["M_values"] == [2, 3]
    assert report.with_suffix(".csv").read_text().startswith("# spec=")
