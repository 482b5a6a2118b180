"""Problem files and solver output files.

A problem file is JSON::

    {"N": 2, "basis": "legendre",
     "A": [{"degree": 0, "matrix": [[2, 0], [0, 1]]}, {"degree": 1, "matrix": [[0, 1], [1, 0]]}],
     "b": [{"degree": 0, "vector": [2, 1]}]}

Degrees must be unique within "A" and within "b"; missing degrees are zero.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass
from pathlib import Path

import jsonschema
import numpy as np

from .analysis import ConvergenceEntry, ConvergenceRecord, default_norm_order, fit_geometric_rate, residual_l2
from .errors import InputError, InsufficientDataError
from .galerkin import galerkin_solve
from .orthopoly import Family, as_family
from .paramops import ParamMatrix, ParamVector
from .pseudospectral import Method, SpectralSolution, pseudospectral_solve

__all__ = [
    "FORMAT_VERSION",
    "PROBLEM_SCHEMA",
    "Problem",
    "parse_problem",
    "load_problem",
    "problem_to_dict",
    "solve",
    "solution_to_dict",
    "samples_csv",
    "solve_file",
    "converge_file",
]

FORMAT_VERSION = 1

_number = {"type": "number"}
PROBLEM_SCHEMA = {
    "type": "object",
    "required": ["N", "A", "b"],
    "properties": {
        "N": {"type": "integer", "minimum": 1},
        "basis": {"enum": [f.value for f in Family]},
        "A": {
            "type": "array",
            "minItems": 1,
            "items": {
                "type": "object",
                "required": ["degree", "matrix"],
                "properties": {
                    "degree": {"type": "integer", "minimum": 0},
                    "matrix": {"type": "array", "items": {"type": "array", "items": _number}},
                },
            },
        },
        "b": {
            "type": "array",
            "minItems": 1,
            "items": {
                "type": "object",
                "required": ["degree", "vector"],
                "properties": {
                    "degree": {"type": "integer", "minimum": 0},
                    "vector": {"type": "array", "items": _number},
                },
            },
        },
    },
}


@dataclass(frozen=True)
class Problem:
    A: ParamMatrix
    b: ParamVector
    family: Family

    @property
    def N(self) -> int:
        return self.A.N


def _stack(terms, key, shape, where):
    degrees = [t["degree"] for t in terms]
    dup = sorted({d for d in degrees if degrees.count(d) > 1})
    if dup:
        raise InputError(f"{where}: duplicate degree(s) {dup}")
    coeffs = np.zeros((max(degrees) + 1,) + shape)
    for i, t in enumerate(terms):
        arr = np.asarray(t[key], dtype=float)
        if arr.shape != shape:
            raise InputError(f"{where}[{i}].{key}: expected shape {shape}, got {arr.shape}")
        coeffs[t["degree"]] = arr
    return coeffs


def parse_problem(data: dict) -> Problem:
    try:
        jsonschema.validate(data, PROBLEM_SCHEMA)
    except jsonschema.ValidationError as exc:
        path = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise InputError(f"problem file field {path}: {exc.message}") from None
    N = data["N"]
    A = ParamMatrix.polynomial(_stack(data["A"], "matrix", (N, N), "A"))
    b = ParamVector.polynomial(_stack(data["b"], "vector", (N,), "b"))
    return Problem(A, b, as_family(data.get("basis", "legendre")))


def load_problem(path) -> Problem:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise InputError(f"cannot read problem file {path}: {exc.strerror}") from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    return parse_problem(data)


def problem_to_dict(A: ParamMatrix, b: ParamVector, family: Family | str = Family.LEGENDRE) -> dict:
    return {
        "N": A.N,
        "basis": as_family(family).value,
        "A": [{"degree": k, "matrix": c.tolist()} for k, c in enumerate(A.coeffs)],
        "b": [{"degree": k, "vector": c.tolist()} for k, c in enumerate(b.coeffs)],
    }


def solve(problem: Problem, method: Method | str, n: int, *, quad_order: int | None = None) -> SpectralSolution:
    method = Method(method)
    if method is Method.PSEUDOSPECTRAL:
        return pseudospectral_solve(problem.A, problem.b, n, problem.family)
    return galerkin_solve(problem.A, problem.b, n, problem.family, m=quad_order)


def solution_to_dict(y: SpectralSolution) -> dict:
    return {
        "format_version": FORMAT_VERSION,
        "method": y.method.value,
        "basis": y.family.value,
        "N": y.N,
        "n": y.n,
        "coeffs": y.coeffs.tolist(),
    }


def samples_csv(y: SpectralSolution, count: int) -> str:
    s = np.linspace(-1.0, 1.0, count)
    X = y(s)
    lines = [",".join(["s"] + [f"x_{i}" for i in range(y.N)])]
    for k in range(count):
        lines.append(",".join(repr(float(v)) for v in (s[k], *X[:, k])))
    return "\n".join(lines) + "\n"


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _write_all(out_dir: Path, files: dict) -> dict:
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = {}
    for name, text in files.items():
        p = out_dir / name
        p.write_text(text)
        paths[name] = p
    return paths


def solve_file(path, method: Method | str, n: int, out_dir, *, quad_order: int | None = None,
               sample_points: int = 0) -> dict:
    """Solve a problem file and write its outputs.

    Writes ``coefficients.json``, ``manifest.json`` and ``timings.json``, plus
    ``samples.csv`` when ``sample_points > 0``. Nothing is written unless the
    input parses and the solve succeeds. Returns the written paths by name.
    """
    problem = load_problem(path)
    t0 = time.perf_counter()
    y = solve(problem, method, n, quad_order=quad_order)
    elapsed = time.perf_counter() - t0
    q = default_norm_order(n, problem.A, problem.b)
    manifest = {
        "format_version": FORMAT_VERSION,
        "input": Path(path).name,
        "method": y.method.value,
        "basis": y.family.value,
        "n": n,
        "N": y.N,
        "diagnostics": y.info,
        "residual_l2": residual_l2(y, problem.A, problem.b, q),
        "residual_quad_order": q,
    }
    files = {
        "coefficients.json": _dump(solution_to_dict(y)),
        "manifest.json": _dump(manifest),
        "timings.json": _dump({"solve_ms": 1e3 * elapsed}),
    }
    if sample_points > 0:
        files["samples.csv"] = samples_csv(y, sample_points)
    return _write_all(Path(out_dir), files)


def converge_file(path, n_min: int, n_max: int, out_dir=None, *, quad_order: int | None = None) -> dict:
    """Residual convergence of both methods for n in [n_min, n_max]."""
    problem = load_problem(path)
    if not 1 <= n_min <= n_max:
        raise InputError("need 1 <= n_min <= n_max")
    records = {}
    for method in Method:
        rec = ConvergenceRecord(label=f"{Path(path).name} {method.value}")
        for n in range(n_min, n_max + 1):
            t0 = time.perf_counter()
            y = solve(problem, method, n, quad_order=quad_order)
            elapsed = time.perf_counter() - t0
            q = default_norm_order(n, problem.A, problem.b)
            rec.add(ConvergenceEntry(n, residual_l2(y, problem.A, problem.b, q), None, elapsed))
        rec.quadrature_order_used = q
        try:
            rec.fitted_rate = fit_geometric_rate(rec)
        except InsufficientDataError:
            rec.fitted_rate = None
        records[method.value] = rec
    if out_dir is not None:
        files = {f"convergence_{k}.csv": r.to_csv() for k, r in records.items()}
        files["convergence.json"] = _dump({k: r.to_dict(timings=False) for k, r in records.items()})
        _write_all(Path(out_dir), files)
    return records
