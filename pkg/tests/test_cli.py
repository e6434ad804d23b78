import csv
import io
import json
import math
import subprocess
import sys

import numpy as np
import pytest

from conftest import printed_v2_fig2
from susyqm.cli import main


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = main(list(argv), stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


def table(text):
    rows = list(csv.reader(io.StringIO(text)))
    return rows[0], np.array(rows[1:], dtype=float)


def test_potential_fig2_matches_printed():
    code, out, _ = run("potential", "--preset", "fig2", "--npoints", "801")
    assert code == 0
    head, data = table(out)
    assert head == ["x", "V0", "Vk"]
    want = printed_v2_fig2(data[:, 0])
    assert np.max(np.abs(data[:, 2] - want) / np.maximum(1, np.abs(want))) < 1e-8


def test_potential_fig1_window_edges():
    code, out, _ = run("potential", "--preset", "fig1", "--xmin", "-7", "--xmax", "7", "--npoints", "141")
    assert code == 0
    _, data = table(out)
    edge = data[[0, -1]]
    assert np.allclose(edge[:, 2] - edge[:, 1], -1 + 1 / edge[:, 0] ** 2, atol=1e-2)


def test_csv_full_precision(tmp_path):
    path = tmp_path / "v.csv"
    code, out, _ = run("potential", "--model", "pt:3", "--points", "3", "--out", str(path))
    assert code == 0 and out == ""
    line = path.read_text().splitlines()[1]
    assert float(line.split(",")[0]) == pytest.approx(-math.pi / 4 + 0.5e-4, abs=1e-12)
    assert any(len(f.replace("-", "").replace(".", "")) >= 16 for f in line.split(","))


@pytest.mark.parametrize("argv", [
    ("potential", "--model", "well", "--susy", "bogus:x=1"),
    ("potential", "--model", "oscillator", "--susy", "seed:eps=-1.5,nu=2"),
    ("potential", "--model", "morse"),
    ("potential", "--preset", "fig9"),
    ("potential", "--preset", "fig1", "--model", "well"),
    ("coherent", "--flavor", "linear", "--model", "well", "--z", "a,b"),
])
def test_config_errors(argv):
    code, out, err = run(*argv)
    assert code == 2
    obj = json.loads(err)
    assert obj["exit_code"] == 2 and obj["message"]


def test_singular_wronskian_exit_code():
    code, _, err = run("potential", "--model", "oscillator", "--susy", "seed:eps=-1.5,mu=3")
    assert code == 3
    obj = json.loads(err)
    assert obj["error"] == "SingularWronskian" and "x" in obj


def test_verify_algebra_suite():
    code, out, _ = run("verify", "--suite", "algebra", "--model", "well", "--dim", "12")
    assert code == 0
    rep = json.loads(out)
    assert all(v < 1e-10 for v in rep["suites"]["algebra"]["defects"].values())


def test_verify_spectrum_fig3():
    code, out, _ = run("verify", "--suite", "spectrum", "--preset", "fig3")
    assert code == 0
    got = json.loads(out)["suites"]["spectrum"]["computed"][:4]
    assert np.allclose(got, [1.5, 4.5, 8.0, 12.5], atol=1e-3)


def test_verify_moments_pt():
    code, out, _ = run("verify", "--suite", "moments", "--model", "pt:3", "--mmax", "8")
    assert code == 0
    assert max(json.loads(out)["suites"]["moments"]["defects"]) < 1e-8


def test_threshold_env(monkeypatch):
    monkeypatch.setenv("SUSYQM_TOL", "1e-30")
    code, out, _ = run("verify", "--suite", "spectrum", "--preset", "fig2")
    assert code == 4
    assert json.loads(out)["passed"] is False
    monkeypatch.setenv("SUSYQM_TOL", "tiny")
    assert run("verify", "--suite", "spectrum", "--preset", "fig2")[0] == 2


def test_coherent_linear_poisson():
    code, out, _ = run("coherent", "--flavor", "linear", "--model", "oscillator", "--z", "1,0")
    assert code == 0
    rep = json.loads(out)
    mods = np.hypot(*np.array(rep["coeffs"]).T)
    m = np.arange(len(mods))
    want = np.exp(-0.5) / np.sqrt([math.factorial(k) for k in m])
    assert np.allclose(mods, want, rtol=1e-12)


def test_coherent_natural_offset():
    code, out, _ = run("coherent", "--flavor", "natural", "--preset", "fig1", "--z", "2,0")
    assert code == 0
    rep = json.loads(out)
    assert rep["basis_offset"] == 1
    assert rep["coeffs"][0][0] != 0


def test_coherent_z_zero():
    code, out, _ = run("coherent", "--flavor", "intrinsic", "--model", "well", "--z", "0,0")
    assert json.loads(out)["coeffs"] == [[1.0, 0.0]]


def test_coherent_wavefunction_csv(tmp_path):
    path = tmp_path / "cs.csv"
    code, _, _ = run("coherent", "--flavor", "natural", "--preset", "fig3", "--z", "0.5,0.5",
                     "--emit", str(path), "--points", "101")
    assert code == 0
    head, data = table(path.read_text())
    assert head == ["x", "re_psi", "im_psi", "abs2"]
    assert np.allclose(data[:, 3], data[:, 1] ** 2 + data[:, 2] ** 2)


def test_eigenstate_and_spectrum():
    code, out, _ = run("eigenstate", "--preset", "fig3", "--created", "1", "--points", "51")
    assert code == 0
    _, data = table(out)
    assert np.all(data[:, 1] > 0)
    code, out, _ = run("spectrum", "--preset", "fig1")
    levels = [r["computed"] for r in json.loads(out)["levels"]]
    assert np.allclose(levels, [-1.5, 0.5, 1.5, 2.5, 3.5], atol=1e-3)


def test_verify_algebra_command():
    code, out, _ = run("verify-algebra", "--preset", "fig2", "--flavor", "natural")
    assert code == 0 and json.loads(out)["max_defect"] < 1e-10
    assert run("verify-algebra", "--model", "well", "--flavor", "natural")[0] == 2
    code, out, _ = run("verify-moments", "--model", "well", "--mmax", "4")
    assert code == 0 and json.loads(out)["passed"]


def test_deterministic_output():
    argv = ("verify", "--preset", "fig3")
    assert run(*argv)[1] == run(*argv)[1]


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "susyqm", "potential", "--preset", "fig3", "--points", "5"],
                         capture_output=True, text=True, check=False)
    assert res.returncode == 0
    assert res.stdout.splitlines()[0] == "x,V0,Vk"
