import csv
import io
import json
import subprocess
import sys

import numpy as np
import pytest

from qcirculator.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def matrix_of(capsys, *argv):
    code, out, _ = run(capsys, "matrix", "--format", "json", *argv)
    assert code == 0
    return json.loads(out)


class TestMatrix:
    def test_empty_resonator_is_symmetric(self, capsys):
        doc = matrix_of(capsys, "--atom-state", "none")
        t = np.array(doc["transmissions"])
        np.testing.assert_allclose(t, t.T, atol=1e-10)
        assert doc["metrics"]["fidelity"] == pytest.approx(0.5, abs=0.05)

    def test_opposite_states_are_transposed(self, capsys):
        plus = np.array(matrix_of(capsys, "--atom-state", "m+3")["transmissions"])
        minus_doc = matrix_of(capsys, "--atom-state", "m-3")
        np.testing.assert_allclose(np.array(minus_doc["transmissions"]), plus.T, atol=1e-8)
        assert minus_doc["metrics"]["direction"] == "backward"

    def test_csv_with_summary(self, capsys):
        code, out, _ = run(capsys, "matrix", "--model", "simplified")
        assert code == 0
        rows = [r for r in out.splitlines() if not r.startswith("#")]
        assert len(rows) == 4 and all(len(r.split(",")) == 4 for r in rows)
        assert "# fidelity (forward) =" in out

    def test_angular_units(self, capsys, tmp_path):
        two_pi = 2 * np.pi
        angular = {"kappa_0": 5 * two_pi, "kappa_a": 11 * two_pi, "kappa_b": 6 * two_pi,
                   "gamma": 3 * two_pi, "g": 12 * two_pi}
        f = tmp_path / "p.json"
        f.write_text(json.dumps(angular))
        a = matrix_of(capsys, "--model", "simplified", "--params", str(f), "--units", "angular")
        b = matrix_of(capsys, "--model", "simplified")
        np.testing.assert_allclose(a["transmissions"], b["transmissions"], atol=1e-12)

    def test_byte_identical_reruns(self, capsys, tmp_path):
        outs = []
        for k in range(2):
            path = tmp_path / f"m{k}.json"
            assert main(["matrix", "--model", "simplified", "--format", "json", "--out", str(path)]) == 0
            outs.append(path.read_bytes())
        capsys.readouterr()
        assert outs[0] == outs[1]


class TestScan:
    def test_default_grid_rows(self, capsys, tmp_path):
        path = tmp_path / "scan.csv"
        code, out, _ = run(capsys, "scan", "--model", "simplified", "--out", str(path))
        assert code == 0
        rows = list(csv.reader(io.StringIO(path.read_text())))
        assert rows[0][:5] == ["ratio", "kappa_a", "kappa_b", "T_12", "T_14"]
        assert rows[0][-2:] == ["fidelity", "eta"]
        assert len(rows) == 41
        assert out.startswith("optimum (fidelity): ratio = ")

    def test_json_and_objective(self, capsys):
        code, out, err = run(
            capsys, "scan", "--model", "simplified", "--points", "3", "--format", "json", "--objective", "fidelity*eta"
        )
        assert code == 0
        doc = json.loads(out)
        assert doc["objective"] == "fidelity*eta" and len(doc["points"]) == 3
        assert "optimum" in err

    def test_bad_grid(self, capsys):
        code, _, err = run(capsys, "scan", "--grid-min", "0.5")
        assert code == 2 and "configuration error" in err


class TestG2:
    def test_trace(self, capsys):
        code, out, err = run(capsys, "g2", "--input", "1", "--output", "2", "--points", "5")
        assert code == 0
        rows = list(csv.reader(io.StringIO(out)))
        assert rows[0] == ["tau_us", "g2"] and len(rows) == 6
        assert float(rows[1][1]) == pytest.approx(0.0916, abs=2e-3)
        assert "g2(0) for 1 -> 2" in err

    def test_dark_port(self, capsys):
        code, _, err = run(capsys, "g2", "--input", "1", "--output", "2", "--set", "g=0")
        assert code == 2 and "dark" in err


class TestAnalytic:
    def test_defaults_gamma_line(self, capsys):
        code, out, _ = run(capsys, "analytic")
        assert code == 0
        line = next(l for l in out.splitlines() if l.startswith("Gamma [2pi MHz]"))
        assert float(line.split()[-1]) == pytest.approx(48.0)
        assert "n/a" in out

    def test_preset(self, capsys):
        code, out, _ = run(capsys, "analytic", "--preset", "state-of-the-art", "--format", "json")
        assert code == 0
        res = json.loads(out)["results"]
        assert float(res["fidelity"]) == pytest.approx(0.9416, abs=1e-4)
        assert float(res["eta"]) == pytest.approx(0.9235, abs=1e-4)


class TestMetrics:
    def test_published(self, capsys):
        code, out, _ = run(capsys, "metrics", "--published", "m+3")
        assert code == 0
        assert json.loads(out)["fidelity"] == pytest.approx(0.7194, abs=1e-4)

    def test_from_file(self, capsys, tmp_path):
        f = tmp_path / "t.csv"
        f.write_text("# ideal\n0,1,0,0\n0,0,1,0\n0,0,0,1\n1,0,0,0\n")
        code, out, _ = run(capsys, "metrics", "--matrix", str(f), "--format", "csv")
        assert code == 0 and "fidelity (forward) = 1.0000" in out and ">99" in out

    def test_bad_file(self, capsys, tmp_path):
        f = tmp_path / "t.csv"
        f.write_text("1,1,1,1\n")
        code, _, err = run(capsys, "metrics", "--matrix", str(f))
        assert code == 2


class TestErrors:
    def test_unknown_key(self, capsys):
        code, _, err = run(capsys, "matrix", "--set", "kappa_c=3")
        assert code == 2 and "kappa_c" in err

    def test_bad_set_syntax(self, capsys):
        code, _, _ = run(capsys, "analytic", "--set", "kappa_0")
        assert code == 2

    def test_unreadable_params(self, capsys, tmp_path):
        code, _, err = run(capsys, "analytic", "--params", str(tmp_path / "missing.json"))
        assert code == 2

    def test_module_entry_point(self):
        proc = subprocess.run(
            [sys.executable, "-m", "qcirculator", "metrics", "--published", "none", "--format", "csv"],
            capture_output=True, text=True, check=False,
        )
        assert proc.returncode == 0 and "fidelity" in proc.stdout
