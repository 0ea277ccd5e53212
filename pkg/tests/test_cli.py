import json
import math
import subprocess
import sys

import numpy as np
import pytest

from so3diff.cli import main
from so3diff.core import exp_rodrigues, exp_series
from so3diff.jacobians import generators
from so3diff.solver import synthesize


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def first_json(out):
    return json.loads(out.splitlines()[0])


class TestExp:
    def test_identity(self, capsys):
        code, out, _ = run(capsys, "exp", "0", "0", "0")
        assert code == 0
        assert first_json(out) == np.eye(3).tolist()
        assert len(out.splitlines()) == 4  # json line then aligned text

    def test_quarter_turn(self, capsys):
        _, out, _ = run(capsys, "exp", "1.5707963267948966", "0", "0", "--format", "json")
        np.testing.assert_allclose(first_json(out), [[1, 0, 0], [0, 0, -1], [0, 1, 0]], atol=1e-15)

    def test_lossless_against_series(self, capsys):
        _, out, _ = run(capsys, "exp", "0.3", "-0.7", "0.1", "--format", "json")
        R = np.array(first_json(out))
        np.testing.assert_array_equal(R, exp_rodrigues([0.3, -0.7, 0.1]))
        assert np.linalg.norm(R - exp_series([0.3, -0.7, 0.1], 30)) <= 1e-13

    def test_exponent_negatives(self, capsys):
        code, out, _ = run(capsys, "exp", "1e-3", "-1e-3", "-2.5E-1", "--format", "json")
        assert code == 0
        np.testing.assert_array_equal(first_json(out), exp_rodrigues([1e-3, -1e-3, -0.25]))

    def test_text_precision(self, capsys):
        _, out, _ = run(capsys, "exp", "0.3", "-0.7", "0.1", "--format", "text")
        assert out.split()[0] == "0.762052"

    @pytest.mark.parametrize("argv", [["exp", "1", "x", "0"], ["exp", "1", "2"],
                                      ["exp", "nan", "0", "0"]])
    def test_parse_errors(self, capsys, argv):
        with pytest.raises(SystemExit) as info:
            code = main(argv)
            raise SystemExit(code)
        assert info.value.code == 2
        assert capsys.readouterr().err


class TestLog:
    def test_identity(self, capsys):
        code, out, _ = run(capsys, "log", *"1 0 0 0 1 0 0 0 1".split(), "--format", "json")
        assert code == 0
        assert first_json(out)["v"] == [0.0, 0.0, 0.0]

    def test_round_trip_through_exp(self, capsys):
        _, out, _ = run(capsys, "exp", "0.3", "-0.7", "0.1", "--format", "json")
        entries = [repr(x) for row in first_json(out) for x in row]
        _, out, _ = run(capsys, "log", *entries, "--format", "json")
        res = first_json(out)
        np.testing.assert_allclose(res["v"], [0.3, -0.7, 0.1], atol=1e-15)
        assert res["angle"] == pytest.approx(math.sqrt(0.59), abs=1e-15)

    def test_not_a_rotation(self, capsys):
        code, _, err = run(capsys, "log", *"1 0 0 0 1 0 0 0 2".split())
        assert code == 3
        assert "orthogonality" in err


class TestJac:
    def test_generators(self, capsys):
        _, out, _ = run(capsys, "jac", "0", "0", "0", "--formula", "compact", "--format", "json")
        np.testing.assert_array_equal(first_json(out)["blocks"], generators())

    def test_compact_vs_classical(self, capsys):
        rng = np.random.default_rng(30)
        for _ in range(5):
            v = [repr(float(x)) for x in rng.uniform(-1.5, 1.5, 3)]
            _, a, _ = run(capsys, "jac", *v, "--formula", "compact", "--format", "json")
            _, b, _ = run(capsys, "jac", *v, "--formula", "classical", "--format", "json")
            diff = np.abs(np.array(first_json(a)["blocks"]) - first_json(b)["blocks"]).max()
            assert diff <= 1e-12

    def test_fd_default_step(self, capsys):
        v = ["0.4", "-1.1", "0.2"]
        _, a, _ = run(capsys, "jac", *v, "--format", "json")
        _, b, _ = run(capsys, "jac", *v, "--formula", "fd", "--format", "json")
        assert np.abs(np.array(first_json(a)["blocks"]) - first_json(b)["blocks"]).max() <= 1e-8

    def test_point(self, capsys):
        _, out, _ = run(capsys, "jac", "0", "0", "0", "--point", "1", "2", "3", "--format", "json")
        np.testing.assert_array_equal(first_json(out)["jacobian"],
                                      [[0, 3, -2], [-3, 0, 1], [2, -1, 0]])

    def test_text(self, capsys):
        code, out, _ = run(capsys, "jac", "0.1", "0.2", "0.3", "--format", "text")
        assert code == 0
        assert out.count("dR/dv_") == 3


class TestCheck:
    def test_passes(self, capsys):
        code, out, _ = run(capsys, "check", "--trials", "50", "--seed", "7")
        assert code == 0
        lines = out.strip().splitlines()
        assert lines[0] == "property,trials,max_residual,tolerance,status"
        assert all(line.endswith(",pass") for line in lines[1:])

    def test_single_trial(self, capsys):
        code, out, _ = run(capsys, "check", "--trials", "1")
        assert code == 0
        assert all(line.split(",")[1] == "1" for line in out.strip().splitlines()[1:])

    def test_deterministic(self, capsys):
        _, a, _ = run(capsys, "check", "--trials", "10", "--seed", "3")
        _, b, _ = run(capsys, "check", "--trials", "10", "--seed", "3")
        assert a == b

    def test_jobs(self, capsys):
        _, a, _ = run(capsys, "check", "--trials", "6", "--seed", "3", "--jobs", "2")
        _, b, _ = run(capsys, "check", "--trials", "6", "--seed", "3", "--jobs", "2")
        assert a == b
        assert all(line.endswith(",pass") for line in a.strip().splitlines()[1:])

    def test_failure_exit(self, capsys, monkeypatch):
        from so3diff import properties
        monkeypatch.setattr(properties, "PROPERTIES",
                            properties.PROPERTIES + [("always_bad", lambda rng: 1.0, 0.5)])
        code, out, err = run(capsys, "check", "--trials", "1")
        assert code == 1
        assert "always_bad" in err
        assert out.strip().splitlines()[-1].endswith(",fail")


class TestBench:
    def test_rows_and_accuracy(self, capsys):
        code, out, _ = run(capsys, "bench", "--trials", "20", "--bands", "0.1:3.0", "1e-3:0.1")
        assert code == 0
        lines = out.strip().splitlines()
        assert lines[0] == "formula,band_lo,band_hi,trials,mean_ns_per_eval,max_abs_err"
        rows = [line.split(",") for line in lines[1:]]
        assert len(rows) == 6
        assert {(r[0], r[1]) for r in rows} == {(f, b) for f in ("compact", "classical", "finite-diff")
                                                for b in ("0.1", "0.001")}
        for r in rows:
            if r[0] != "finite-diff":
                assert float(r[5]) <= 1e-8

    def test_bad_band(self, capsys):
        code, _, err = run(capsys, "bench", "--bands", "0:4")
        assert code == 2 and err

    def test_json(self, capsys):
        _, out, _ = run(capsys, "bench", "--trials", "5", "--bands", "0.5:1.0", "--format", "json")
        recs = json.loads(out)
        assert [r["formula"] for r in recs] == ["compact", "classical", "finite-diff"]
        assert recs[0]["theta_band"] == [0.5, 1.0]


class TestFit:
    def test_synth_gn(self, capsys):
        code, out, _ = run(capsys, "fit", "--synth", "50", "2.5", "0", "1", "--method", "gn")
        rep = json.loads(out)
        assert code == 0 and rep["converged"]
        assert rep["angle_error"] <= 1e-8
        assert rep["residual_history"] == sorted(rep["residual_history"], reverse=True)

    def test_trivial(self, capsys):
        _, out, _ = run(capsys, "fit", "--synth", "3", "0", "0", "1")
        rep = json.loads(out)
        assert rep["converged"] and rep["iterations"] == 0
        assert rep["residual_history"] == [0.0]

    def test_input_file(self, capsys, tmp_path):
        c = synthesize(12, [0.2, -0.4, 0.9], 0.0, 3)
        path = tmp_path / "set.json"
        path.write_text(c.to_json())
        code, out, _ = run(capsys, "fit", "--input", str(path), "--v0", "0.1", "0", "0")
        rep = json.loads(out)
        assert code == 0 and rep["converged"]
        np.testing.assert_allclose(rep["v_hat"], [0.2, -0.4, 0.9], atol=1e-9)

    def test_malformed_json(self, capsys, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text("{not json")
        code, _, err = run(capsys, "fit", "--input", str(path))
        assert code == 2 and "bad input" in err

    def test_degenerate(self, capsys, tmp_path):
        pts = [[0, 0, 0], [1, 1, 1], [2, 2, 2]]
        path = tmp_path / "line.json"
        path.write_text(json.dumps({"sources": pts, "targets": pts}))
        code, _, err = run(capsys, "fit", "--input", str(path))
        assert code == 4 and "DegenerateGeometry" in err

    def test_singular(self, capsys, monkeypatch):
        from so3diff import solver

        def boom(*args, **kwargs):
            raise solver.SingularNormalEquations("stuck")
        monkeypatch.setattr(solver, "solve", boom)
        code, _, err = run(capsys, "fit", "--synth", "5", "1", "0", "1")
        assert code == 5 and "SingularNormalEquations" in err

    def test_deterministic(self, capsys):
        _, a, _ = run(capsys, "fit", "--synth", "20", "1.5", "0.01", "4")
        _, b, _ = run(capsys, "fit", "--synth", "20", "1.5", "0.01", "4")
        assert a == b


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "so3diff", "exp", "0", "0", "0", "--format", "json"],
                          capture_output=True, text=True, check=True)
    assert json.loads(proc.stdout) == np.eye(3).tolist()
