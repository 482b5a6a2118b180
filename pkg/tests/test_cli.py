import csv
import json
import subprocess
import sys

import numpy as np
import pytest

from parmspec.cli import main
from parmspec.demos import two_by_two
from parmspec.errors import InputError
from parmspec.galerkin import galerkin_solve
from parmspec.problem_io import load_problem, parse_problem, problem_to_dict


def write(path, obj):
    path.write_text(obj if isinstance(obj, str) else json.dumps(obj))
    return path


@pytest.fixture
def two_by_two_file(tmp_path):
    A, b = two_by_two(1.0)
    return write(tmp_path / "p.json", problem_to_dict(A, b))


def test_minimal_constant_problem(tmp_path):
    p = write(tmp_path / "c.json", {"N": 2, "A": [{"degree": 0, "matrix": [[2, 1], [1, 3]]}],
                                    "b": [{"degree": 0, "vector": [1, 2]}]})
    out = tmp_path / "out"
    assert main(["solve", "--input", str(p), "--method", "pseudospectral", "--n", "3", "--out-dir", str(out)]) == 0
    coeffs = json.loads((out / "coefficients.json").read_text())
    assert coeffs["N"] == 2 and coeffs["n"] == 3 and coeffs["basis"] == "legendre"
    X = np.array(coeffs["coeffs"])
    np.testing.assert_allclose(X[:, 0], np.linalg.solve([[2, 1], [1, 3]], [1, 2]), atol=1e-14)
    np.testing.assert_allclose(X[:, 1:], 0, atol=1e-14)


def test_file_matches_demo_path(two_by_two_file, tmp_path):
    out = tmp_path / "g"
    assert main(["solve", "--input", str(two_by_two_file), "--method", "galerkin", "--n", "6",
                 "--out-dir", str(out)]) == 0
    X = np.array(json.loads((out / "coefficients.json").read_text())["coeffs"])
    A, b = two_by_two(1.0)
    np.testing.assert_allclose(X, galerkin_solve(A, b, 6).coeffs, atol=1e-12, rtol=0)
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["method"] == "galerkin" and manifest["diagnostics"]["m"] == 6
    assert "solve_ms" in json.loads((out / "timings.json").read_text())
    assert "solve_ms" not in (out / "manifest.json").read_text()


def test_samples_csv(two_by_two_file, tmp_path):
    out = tmp_path / "s"
    main(["solve", "--input", str(two_by_two_file), "--n", "8", "--sample-points", "5", "--out-dir", str(out)])
    rows = list(csv.reader((out / "samples.csv").open()))
    assert rows[0] == ["s", "x_0", "x_1"] and len(rows) == 6
    assert float(rows[1][0]) == -1.0


def test_outputs_are_deterministic(two_by_two_file, tmp_path):
    for d in ("a", "b"):
        main(["solve", "--input", str(two_by_two_file), "--method", "galerkin", "--n", "5",
              "--sample-points", "7", "--out-dir", str(tmp_path / d)])
    for name in ("coefficients.json", "manifest.json", "samples.csv"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_malformed_json(tmp_path, caplog):
    p = write(tmp_path / "bad.json", '{"N": 2,\n "A": [}')
    out = tmp_path / "out"
    assert main(["solve", "--input", str(p), "--n", "3", "--out-dir", str(out)]) == 2
    assert not out.exists()
    assert "line 2" in caplog.text


@pytest.mark.parametrize("data, fragment", [
    ({"N": 2, "A": [{"degree": 0, "matrix": [[1, 0], [0, 1]]}]}, "'b' is a required"),
    ({"N": 2, "basis": "hermite", "A": [{"degree": 0, "matrix": [[1]]}], "b": [{"degree": 0, "vector": [1]}]},
     "basis"),
    ({"N": 1, "A": [{"degree": 0, "matrix": [[1]]}, {"degree": 0, "matrix": [[2]]}],
      "b": [{"degree": 0, "vector": [1]}]}, "duplicate"),
    ({"N": 2, "A": [{"degree": 0, "matrix": [[1]]}], "b": [{"degree": 0, "vector": [1, 1]}]}, "shape"),
    ({"N": 1, "A": [{"degree": -1, "matrix": [[1]]}], "b": [{"degree": 0, "vector": [1]}]}, "A/0/degree"),
])
def test_schema_errors(data, fragment):
    with pytest.raises(InputError, match=fragment):
        parse_problem(data)


def test_missing_file(tmp_path):
    with pytest.raises(InputError):
        load_problem(tmp_path / "nope.json")


def test_round_trip_problem_dict():
    A, b = two_by_two(0.3)
    p = parse_problem(problem_to_dict(A, b, "chebyshev"))
    np.testing.assert_array_equal(p.A.coeffs, A.coeffs)
    assert p.family.value == "chebyshev" and p.N == 2


def test_singular_problem_exit_code(tmp_path):
    # det A(s) = s, exactly singular at the middle node of a 3-point rule
    p = write(tmp_path / "sing.json", {"N": 2, "A": [{"degree": 0, "matrix": [[1, 1], [1, 1]]},
                                                     {"degree": 1, "matrix": [[0, 0], [0, 1]]}],
                                       "b": [{"degree": 0, "vector": [1, 0]}]})
    out = tmp_path / "out"
    assert main(["solve", "--input", str(p), "--method", "pseudospectral", "--n", "3", "--out-dir", str(out)]) == 1
    assert not out.exists()


def test_converge(two_by_two_file, tmp_path, capsys):
    out = tmp_path / "conv"
    assert main(["converge", "--input", str(two_by_two_file), "--n-min", "1", "--n-max", "10",
                 "--out-dir", str(out)]) == 0
    text = capsys.readouterr().out
    assert "pseudospectral: fitted rate" in text and "galerkin: fitted rate" in text
    lines = (out / "convergence_galerkin.csv").read_text().splitlines()
    assert lines[0] == "n,residual_l2,true_error_l2,wall_time_ms" and len(lines) == 11
    data = json.loads((out / "convergence.json").read_text())
    assert set(data) == {"galerkin", "pseudospectral"}


def test_converge_bad_range(two_by_two_file):
    assert main(["converge", "--input", str(two_by_two_file), "--n-min", "5", "--n-max", "2"]) == 2


def test_demo2x2(tmp_path, capsys):
    assert main(["demo2x2", "--eps", "1", "--n-max", "12", "--out-dir", str(tmp_path)]) == 0
    text = capsys.readouterr().out
    assert "predicted rate 2.4142" in text
    data = json.loads((tmp_path / "demo2x2_eps1.json").read_text())
    assert data["predicted_rate"] == pytest.approx(1 + 2**0.5)


def test_demo_ode(tmp_path, capsys):
    assert main(["demo-ode", "--eps", "0.2", "--elements", "16", "--n-max", "5", "--poly-degree", "10",
                 "--out-dir", str(tmp_path)]) == 0
    text = capsys.readouterr().out
    assert "truncated_d10" in text
    assert (tmp_path / "demo_ode_eps0.2_galerkin.csv").exists()


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "parmspec", "--help"], capture_output=True, text=True)
    assert proc.returncode == 0 and "demo-ode" in proc.stdout
