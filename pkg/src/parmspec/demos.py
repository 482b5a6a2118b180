"""The two worked examples: a 2x2 parameterized system and a parameterized FEM problem."""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from .analysis import (
    ConvergenceEntry,
    ConvergenceRecord,
    RateFit,
    default_norm_order,
    ellipse_parameter,
    fit_geometric_rate,
    residual_l2,
    true_error_l2,
)
from .errors import InsufficientDataError
from .fem import FemProblem, assemble_fem
from .galerkin import default_quad_order, galerkin_solve
from .paramops import ParamMatrix, ParamVector, truncate_general_to_polynomial
from .pseudospectral import pseudospectral_solve

__all__ = [
    "two_by_two",
    "two_by_two_exact",
    "Demo2x2Result",
    "demo_2x2",
    "OdeDemoResult",
    "demo_ode",
]


def two_by_two(eps: float):
    """``[[1+eps, s], [s, 1]] x = [2, 1]`` as polynomial-form data."""
    A = ParamMatrix.polynomial([[[1.0 + eps, 0.0], [0.0, 1.0]], [[0.0, 1.0], [1.0, 0.0]]])
    b = ParamVector.polynomial([[2.0, 1.0]])
    return A, b


def two_by_two_exact(eps: float):
    """Closed-form solution; poles at s = +-sqrt(1 + eps)."""

    def x(s):
        s = np.asarray(s, dtype=float)
        den = 1.0 + eps - s * s
        return np.stack([(2.0 - s) / den, (1.0 + eps - 2.0 * s) / den])

    return x


def default_error_order(eps: float, n_max: int) -> int:
    """Fixed Gauss order for the 2x2 true-error norm.

    The exact solution has poles at distance ~eps/2 beyond +-1, so the rule
    must resolve them: Gauss error decays like rho*^(-2q), hence q of order
    10 / log(rho*). The same rule is used for every n so the measured
    errors are comparable across n.
    """
    rho = ellipse_parameter(np.sqrt(1.0 + eps))
    return int(min(max(4 * n_max + 20, math.ceil(10.0 / math.log(rho))), 1500))


def _try_fit(record, quantity):
    try:
        return fit_geometric_rate(record, quantity)
    except InsufficientDataError:
        return None


@dataclass
class Demo2x2Result:
    eps: float
    record: ConvergenceRecord
    residual_fit: RateFit | None
    error_fit: RateFit | None
    predicted_rate: float
    galerkin_max_diff: list = field(default_factory=list)


def demo_2x2(eps: float, n_max: int = 30, *, n_min: int = 1, error_quad_order: int | None = None,
             check_galerkin: bool = True) -> Demo2x2Result:
    """Pseudospectral convergence study for the 2x2 example.

    Each entry holds the residual and true L2 errors of the n-term
    approximation. Galerkin coincides with pseudospectral here (A is linear
    in s, b constant), which is checked coefficient-wise when
    ``check_galerkin`` is set.
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    A, b = two_by_two(eps)
    exact = two_by_two_exact(eps)
    record = ConvergenceRecord(label=f"2x2 pseudospectral eps={eps:g}")
    q_err = default_error_order(eps, n_max) if error_quad_order is None else error_quad_order
    diffs = []
    for n in range(n_min, n_max + 1):
        t0 = time.perf_counter()
        y = pseudospectral_solve(A, b, n)
        elapsed = time.perf_counter() - t0
        q = default_norm_order(n, A, b)
        record.add(ConvergenceEntry(n, residual_l2(y, A, b, q), true_error_l2(y, exact, q_err), elapsed))
        if check_galerkin:
            g = galerkin_solve(A, b, n)
            diffs.append(float(np.abs(g.coeffs - y.coeffs).max()))
    record.quadrature_order_used = q_err
    res_fit = _try_fit(record, "residual_l2")
    err_fit = _try_fit(record, "true_error_l2")
    record.fitted_rate = err_fit
    return Demo2x2Result(eps, record, res_fit, err_fit, ellipse_parameter(np.sqrt(1.0 + eps)), diffs)


@dataclass
class OdeDemoResult:
    fem: FemProblem
    galerkin: ConvergenceRecord
    pseudospectral: ConvergenceRecord
    truncated: ConvergenceRecord | None = None
    poly_degree: int | None = None


def demo_ode(eps: float = 0.2, n_elements: int = 64, n_max: int = 12, m: int | None = None, *,
             n_min: int = 1, poly_degree: int | None = None, max_workers: int | None = None) -> OdeDemoResult:
    """Residual convergence of Galerkin and pseudospectral on the FEM problem.

    Galerkin integrals use m Gauss points (default ``2n + 10``). With
    ``poly_degree`` set, a third record uses the exact Jacobi route on the
    degree-``poly_degree`` interpolant of A(u); its residual is still
    measured against the true A(u).
    """
    fem = assemble_fem(n_elements, eps)
    A = fem.param_matrix()
    b = fem.param_vector()
    gal = ConvergenceRecord(label=f"ode galerkin eps={eps:g}")
    ps = ConvergenceRecord(label=f"ode pseudospectral eps={eps:g}")
    trunc = None
    A_poly = None
    if poly_degree is not None:
        A_poly = truncate_general_to_polynomial(A, poly_degree)
        trunc = ConvergenceRecord(label=f"ode galerkin truncated degree={poly_degree} eps={eps:g}")
    for n in range(n_min, n_max + 1):
        q = default_norm_order(n)
        t0 = time.perf_counter()
        yg = galerkin_solve(A, b, n, m=m if m is not None else default_quad_order(n), max_workers=max_workers)
        t1 = time.perf_counter()
        yp = pseudospectral_solve(A, b, n, max_workers=max_workers)
        t2 = time.perf_counter()
        gal.add(ConvergenceEntry(n, residual_l2(yg, A, b, q), None, t1 - t0))
        ps.add(ConvergenceEntry(n, residual_l2(yp, A, b, q), None, t2 - t1))
        if A_poly is not None:
            t0 = time.perf_counter()
            yt = galerkin_solve(A_poly, b, n)
            trunc.add(ConvergenceEntry(n, residual_l2(yt, A, b, q), None, time.perf_counter() - t0))
    for rec in (gal, ps, trunc):
        if rec is not None:
            rec.quadrature_order_used = q
            rec.fitted_rate = _try_fit(rec, "residual_l2")
    return OdeDemoResult(fem, gal, ps, trunc, poly_degree)
