"""Error norms, convergence-rate fitting and small brute-force oracles."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import InsufficientDataError, PoleInsideDomainError, SingularSystemError
from .orthopoly import Family, _table, eval_basis, gauss_nodes_weights
from .paramops import ParamMatrix, ParamVector
from .pseudospectral import SpectralSolution

__all__ = [
    "ConvergenceEntry",
    "ConvergenceRecord",
    "RateFit",
    "default_norm_order",
    "residual_l2",
    "true_error_l2",
    "l2_norm",
    "fit_geometric_rate",
    "ellipse_parameter",
    "singular_value_bounds",
    "cramer_oracle",
    "fourier_coefficients",
]

ROUNDOFF_FLOOR = 1e-13


def default_norm_order(n: int, A: ParamMatrix | None = None, b: ParamVector | None = None) -> int:
    """Gauss order for L2 norms of degree-(n-1) approximations.

    Polynomial data gets ``2n + m_a + 5`` points (exact for the squared
    residual, with slack); general data gets ``4n + 20``.
    """
    if A is not None and b is not None and A.is_polynomial and b.is_polynomial:
        return max(2 * n + A.degree + 5, b.degree + 5)
    return 4 * n + 20


def l2_norm(f: Callable, q: int, family: Family | str = Family.LEGENDRE) -> float:
    """Weighted L2 norm of a vector-valued function with a q-point Gauss rule.

    ``f`` is called with the array of nodes and must return shape (N, q).
    """
    rule = gauss_nodes_weights(family, q)
    vals = np.asarray(f(rule.nodes), dtype=float).reshape(-1, q)
    return math.sqrt(float(np.sum(vals**2, axis=0) @ rule.weights))


def _residual_values(y: SpectralSolution, A: ParamMatrix, b: ParamVector, nodes) -> np.ndarray:
    As = A.evaluate_many(nodes)
    bs = b.evaluate_many(nodes)
    ys = y(nodes)  # (N, q)
    return (np.einsum("kij,jk->ik", As, ys) - bs.T)


def residual_l2(y: SpectralSolution, A: ParamMatrix, b: ParamVector, q: int | None = None) -> float:
    """``sqrt(<r^T r>_q)`` for ``r(s) = A(s) y(s) - b(s)``."""
    if q is None:
        q = default_norm_order(y.n, A, b)
    return l2_norm(lambda s: _residual_values(y, A, b, s), q, y.family)


def true_error_l2(y: SpectralSolution, x_exact: Callable, q: int | None = None) -> float:
    """``sqrt(<(x - y)^T (x - y)>_q)``.

    ``x_exact`` maps an array of points to shape (N, len(points)).
    """
    if q is None:
        q = default_norm_order(y.n)
    return l2_norm(lambda s: np.asarray(x_exact(s)) - y(s), q, y.family)


@dataclass
class ConvergenceEntry:
    n: int
    residual_l2: float
    true_error_l2: float | None = None
    wall_time: float = 0.0  # seconds


@dataclass(frozen=True)
class RateFit:
    """Least-squares fit ``log(err) ~ log(C) - n log(rate)``."""

    rate: float
    slope: float
    intercept: float
    slope_stderr: float
    r_squared: float
    n_used: tuple

    @property
    def constant(self) -> float:
        return math.exp(self.intercept)


@dataclass
class ConvergenceRecord:
    entries: list = field(default_factory=list)
    fitted_rate: RateFit | None = None
    quadrature_order_used: int | None = None
    label: str = ""

    def add(self, entry: ConvergenceEntry) -> None:
        if entry.residual_l2 < 0:
            raise ValueError("residual norm must be non-negative")
        if self.entries and entry.n <= self.entries[-1].n:
            raise ValueError("entries must be strictly increasing in n")
        self.entries.append(entry)

    def column(self, name: str) -> np.ndarray:
        return np.array([np.nan if getattr(e, name) is None else getattr(e, name) for e in self.entries], dtype=float)

    @property
    def ns(self) -> np.ndarray:
        return np.array([e.n for e in self.entries])

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["n", "residual_l2", "true_error_l2", "wall_time_ms"])
        for e in self.entries:
            err = "" if e.true_error_l2 is None else repr(float(e.true_error_l2))
            w.writerow([e.n, repr(float(e.residual_l2)), err, f"{1e3 * e.wall_time:.3f}"])
        return buf.getvalue()

    def to_dict(self, *, timings: bool = True) -> dict:
        rows = []
        for e in self.entries:
            row = {"n": e.n, "residual_l2": e.residual_l2, "true_error_l2": e.true_error_l2}
            if timings:
                row["wall_time_ms"] = 1e3 * e.wall_time
            rows.append(row)
        fit = None
        if self.fitted_rate is not None:
            fit = asdict(self.fitted_rate)
            fit["n_used"] = list(fit["n_used"])
        return {
            "label": self.label,
            "entries": rows,
            "fitted_rate": fit,
            "quadrature_order_used": self.quadrature_order_used,
        }

    def to_json(self, *, timings: bool = True) -> str:
        return json.dumps(self.to_dict(timings=timings), indent=2)


def fit_geometric_rate(data, quantity: str = "residual_l2", *, ns: Sequence[int] | None = None,
                       floor: float = ROUNDOFF_FLOOR, min_points: int = 4) -> RateFit:
    """Fit ``err(n) ~ C rate^-n`` by least squares on log(err).

    Parameters
    ----------
    data : ConvergenceRecord or sequence of float
        Either a record (``quantity`` picks the column) or raw values, in
        which case ``ns`` gives the matching orders.
    floor : float
        Values at or below ``floor`` times the largest value are round-off
        plateau and are dropped before fitting.
    """
    if isinstance(data, ConvergenceRecord):
        ns = data.ns
        vals = data.column(quantity)
    else:
        vals = np.asarray(data, dtype=float)
        ns = np.arange(1, vals.size + 1) if ns is None else np.asarray(ns)
    ok = np.isfinite(vals) & (vals > 0)
    if ok.any():
        ok &= vals > floor * vals[ok].max()
    x = np.asarray(ns, dtype=float)[ok]
    y = np.log(vals[ok])
    if x.size < min_points:
        raise InsufficientDataError(f"need at least {min_points} entries above the round-off floor, got {x.size}")
    xm, ym = x.mean(), y.mean()
    sxx = np.sum((x - xm) ** 2)
    slope = float(np.sum((x - xm) * (y - ym)) / sxx)
    intercept = float(ym - slope * xm)
    resid = y - (intercept + slope * x)
    ss_res = float(resid @ resid)
    ss_tot = float(np.sum((y - ym) ** 2))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    stderr = math.sqrt(ss_res / (x.size - 2) / sxx) if x.size > 2 else float("nan")
    return RateFit(math.exp(-slope), slope, intercept, stderr, r2, tuple(int(v) for v in x))


def ellipse_parameter(pole: float) -> float:
    """Semi-axis sum of the Bernstein ellipse (foci +-1) through a real pole."""
    a = abs(float(pole))
    if a <= 1.0:
        raise PoleInsideDomainError(f"pole at {pole} lies on [-1, 1]")
    return a + math.sqrt(a * a - 1.0)


def singular_value_bounds(A: ParamMatrix, samples: int = 50) -> tuple[float, float]:
    """``(min_s sigma_min(A(s)), max_s sigma_max(A(s)))`` over a uniform grid on [-1, 1]."""
    sv = np.linalg.svd(A.evaluate_many(np.linspace(-1.0, 1.0, samples)), compute_uv=False)
    return float(sv[:, -1].min()), float(sv[:, 0].max())


def _det(M) -> float:
    n = len(M)
    if n == 1:
        return M[0][0]
    if n == 2:
        return M[0][0] * M[1][1] - M[0][1] * M[1][0]
    # cofactor expansion along the first row
    return sum(
        (-1) ** j * M[0][j] * _det([row[:j] + row[j + 1:] for row in M[1:]]) for j in range(n)
    )


def cramer_oracle(A: ParamMatrix, b: ParamVector, s: float) -> np.ndarray:
    """Solve ``A(s) x = b(s)`` by determinant ratios (N <= 3 only)."""
    if A.N > 3:
        raise ValueError("cramer_oracle supports N <= 3")
    M = A(s).tolist()
    rhs = b(s).tolist()
    det = _det(M)
    if det == 0.0:
        raise SingularSystemError(f"det A(s) = 0 at s = {s}")
    x = []
    for i in range(A.N):
        Mi = [row[:i] + [rhs[r]] + row[i + 1:] for r, row in enumerate(M)]
        x.append(_det(Mi) / det)
    return np.array(x)


def fourier_coefficients(f: Callable, count: int, q: int, family: Family | str = Family.LEGENDRE) -> np.ndarray:
    """``<f pi_k>_q`` for k < count, for a scalar f vectorized over points."""
    rule = gauss_nodes_weights(family, q)
    P = eval_basis(_table(family, count), count, rule.nodes)
    return P @ (np.asarray(f(rule.nodes), dtype=float) * rule.weights)
