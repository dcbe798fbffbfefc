import json
import subprocess
import sys

import numpy as np
import pytest

from eit_disting import spectra
from eit_disting.cli import main, parse_center, render
from eit_disting.geometry import mobius_apply
from eit_disting.operator_matrix import parse_text


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def csv_rows(text):
    lines = [l for l in text.splitlines() if not l.startswith("#")]
    header = lines[0].split(",")
    return [dict(zip(header, l.split(","))) for l in lines[1:]]


def test_parse_center():
    assert parse_center("0.3") == 0.3
    assert parse_center("0.3, -0.2") == 0.3 - 0.2j
    with pytest.raises(Exception):
        parse_center("1,2,3")


def test_map_concentric(capsys):
    code, out, _ = run(capsys, "map", "--center", "0", "--radius", "0.3")
    assert code == 0
    assert out.startswith("# eit-disting map schema v1\n")
    row = csv_rows(out)[0]
    assert float(row["a_re"]) == 0 and float(row["r"]) == pytest.approx(0.3)


def test_map_three_point_circle(capsys):
    _, out, _ = run(capsys, "map", "--center", "0.7", "--radius", "0.2")
    row = csv_rows(out)[0]
    a = complex(float(row["a_re"]), float(row["a_im"]))
    for x in (0.9, 0.5, 0.7 + 0.2j):
        assert abs(abs(mobius_apply(a, x)) - float(row["r"])) < 1e-13


def test_map_invalid_geometry(capsys):
    code, out, err = run(capsys, "map", "--center", "0.9", "--radius", "0.2")
    assert code == 2
    assert "inclusion not inside unit disk" in err
    assert out == ""


def test_invalid_contrast(capsys):
    code, _, err = run(capsys, "spectrum", "--center", "0.2", "--radius", "0.1", "--contrast", "-2")
    assert code == 2 and "contrast" in err


def test_spectrum_concentric(capsys):
    code, out, _ = run(capsys, "spectrum", "--center", "0", "--radius", "0.5", "--top", "4")
    assert code == 0
    rows = csv_rows(out)
    lam = spectra.dn_diff_eigenvalue(spectra.ConcentricSpec(0.5, 2.0), [1, 1, 2, 2])
    np.testing.assert_allclose([float(r["eigenvalue"]) for r in rows], lam, rtol=1e-15)
    assert [int(r["rank"]) for r in rows] == [1, 2, 3, 4]


def test_spectrum_verify_column(capsys):
    _, out, _ = run(capsys, "spectrum", "--center", "0.7", "--radius", "0.2", "--top", "2", "--verify")
    rows = csv_rows(out)
    assert float(rows[0]["oracle_norm"]) == pytest.approx(float(rows[0]["magnitude"]), rel=1e-6)


def test_spectrum_strict_non_convergence(capsys):
    code, _, _ = run(capsys, "spectrum", "--center", "0.95", "--radius", "0.04", "--top", "4",
                     "--tol", "1e-300", "--n-max", "64", "--strict")
    assert code == 3
    code, _, _ = run(capsys, "spectrum", "--center", "0.95", "--radius", "0.04", "--top", "4",
                     "--tol", "1e-300", "--n-max", "64")
    assert code == 0


def test_spectrum_json(capsys):
    _, out, _ = run(capsys, "spectrum", "--center", "0.3,0.3", "--radius", "0.2", "--kind", "nd",
                    "--top", "3", "--format", "json")
    rows = json.loads(out)
    assert len(rows) == 3 and rows[0]["converged"] is True
    assert all(r["eigenvalue"] < 0 for r in rows)


def test_matrix_export(capsys, tmp_path):
    path = tmp_path / "m.txt"
    code, out, _ = run(capsys, "matrix", "--center", "0.5,0.2", "--radius", "0.2", "--truncation", "5",
                       "--out", str(path))
    assert code == 0 and out == ""
    text = path.read_bytes().decode()
    assert "\r" not in text
    body = [l for l in text.splitlines() if not l.startswith("#")]
    assert len(body) <= 3 * 11
    assert parse_text(text)["header"]["kind"] == "dn_diff"


def test_matrix_concentric_diagonal(capsys):
    _, out, _ = run(capsys, "matrix", "--center", "0", "--radius", "0.3", "--truncation", "4")
    assert all(i == j for i, j in parse_text(out)["entries"])


@pytest.mark.parametrize("kind", ["dn", "nd", "nd_full"])
def test_matrix_verify(capsys, kind):
    code, out, _ = run(capsys, "matrix", "--center", "0.4,-0.3", "--radius", "0.2", "--kind", kind,
                       "--truncation", "6", "--verify")
    assert code == 0
    assert float(parse_text(out)["header"]["max_abs_diff"]) < 1e-10


def test_eigenfunction(capsys):
    code, out, _ = run(capsys, "eigenfunction", "--center", "0.5", "--radius", "0.1", "--grid", "256")
    assert code == 0
    rows = csv_rows(out)
    assert len(rows) == 256
    mags = np.array([float(r["abs"]) for r in rows])
    assert np.argmax(mags) == 0
    assert np.sqrt(2 * np.pi / 256 * np.sum(mags ** 2)) == pytest.approx(1.0, abs=1e-8)


def test_sweep_bounds(capsys):
    code, out, _ = run(capsys, "sweep", "--radius", "0.1", "--stop", "0.5", "--step", "0.1", "--threads", "2")
    assert code == 0
    rows = csv_rows(out)
    assert [float(r["rho"]) for r in rows] == [0.0, 0.1, 0.2, 0.3, 0.4, 0.5]
    assert all(r["in_bounds"] == "true" for r in rows)
    assert float(rows[0]["ratio"]) == 1.0


def test_sweep_nd_json(capsys):
    _, out, _ = run(capsys, "sweep", "--kind", "nd", "--radius", "0.5", "--stop", "0.9", "--step", "0.3",
                    "--format", "json")
    rows = json.loads(out)
    assert all(r["ratio"] >= 1 - 1e-12 and r["in_bounds"] for r in rows)


def test_sweep_depth(capsys):
    _, out, _ = run(capsys, "sweep", "--study", "depth", "--radius", "0.1", "--stop", "0.8", "--step", "0.4",
                    "--top", "4")
    rows = csv_rows(out)
    assert len(rows) == 12
    first = [float(r["magnitude"]) for r in rows if r["rank"] == "1"]
    assert first == sorted(first)


def test_sweep_fixed_size(capsys):
    _, out, _ = run(capsys, "sweep", "--study", "fixed-size", "--radius", "0.1", "--stop", "0.6",
                    "--step", "0.3")
    rows = csv_rows(out)
    assert all(r["in_bounds"] == "true" and r["monotone"] == "true" for r in rows)


def test_sweep_rejects_bad_grid(capsys):
    code, _, err = run(capsys, "sweep", "--radius", "0.1", "--step", "0")
    assert code == 2
    code, _, _ = run(capsys, "sweep", "--radius", "0.1", "--stop", "0.999", "--start", "0.995")
    assert code == 2


def test_threads_from_environment(capsys, monkeypatch):
    monkeypatch.setenv("EIT_DISTING_THREADS", "3")
    from eit_disting.cli import SweepConfig, build_parser
    args = build_parser().parse_args(["sweep", "--radius", "0.1"])
    assert SweepConfig.from_args(args).threads == 3


def test_verify(capsys):
    code, out, _ = run(capsys, "verify", "--center", "0.6,0.3", "--radius", "0.15", "--contrast", "-0.5")
    assert code == 0
    assert all(r["passed"] == "true" for r in csv_rows(out))


def test_render_json_is_flat():
    text = render([{"x": 0.1, "ok": True, "name": "a"}], ["x", "ok", "name"], "json", "t")
    assert json.loads(text) == [{"x": 0.1, "ok": True, "name": "a"}]


def test_byte_deterministic():
    argv = [sys.executable, "-m", "eit_disting", "spectrum", "--center", "0.4,0.4", "--radius", "0.2",
            "--top", "6"]
    first = subprocess.run(argv, capture_output=True, check=True).stdout
    second = subprocess.run(argv, capture_output=True, check=True).stdout
    assert first == second
    assert b"\r\n" not in first


def test_module_exit_code():
    proc = subprocess.run([sys.executable, "-m", "eit_disting", "map", "--center", "0.9", "--radius", "0.2"],
                          capture_output=True, text=True)
    assert proc.returncode == 2
    assert "inclusion not inside unit disk" in proc.stderr
