"""Collocation at Gauss nodes and the pseudospectral approximation.

The pseudospectral coefficients are discrete Fourier coefficients
``<x pi_k>_n`` taken with the n-point Gauss rule. With n nodes and n terms
the result is exactly the Lagrange interpolant through the node solves,
which is what makes the cheap basis change ``X_p = X_c diag(q0) Q^T`` valid.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
import scipy.linalg
from scipy.linalg import lapack

from .errors import NodeSolveError
from .orthopoly import Family, QuadratureRule, RecurrenceTable, as_family, eval_basis, gauss_quadrature, _table
from .paramops import ParamMatrix, ParamVector

__all__ = [
    "Method",
    "SpectralSolution",
    "CollocationSolves",
    "dense_solve",
    "collocate",
    "barycentric_weights",
    "evaluate_lagrange",
    "to_spectral",
    "to_collocation",
    "pseudospectral_solve",
]

# reciprocal condition numbers below this are treated as singular
RCOND_SINGULAR = np.finfo(float).eps


class Method(str, Enum):
    PSEUDOSPECTRAL = "pseudospectral"
    GALERKIN = "galerkin"


@dataclass(frozen=True)
class SpectralSolution:
    """``x(s) ~ coeffs @ pi_n(s)`` with coeffs of shape (N, n)."""

    coeffs: np.ndarray
    table: RecurrenceTable
    method: Method
    info: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=float)
        if c.ndim != 2 or c.shape[1] < 1:
            raise ValueError(f"coefficients must be N x n with n >= 1, got shape {c.shape}")
        if not np.all(np.isfinite(c)):
            raise ValueError("coefficients must be finite")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @property
    def N(self) -> int:
        return self.coeffs.shape[0]

    @property
    def n(self) -> int:
        return self.coeffs.shape[1]

    @property
    def family(self) -> Family:
        return self.table.family

    def __call__(self, s) -> np.ndarray:
        """Evaluate at scalar s (shape (N,)) or an array of points (shape (N, *S))."""
        P = eval_basis(self.table, self.n, s)
        return np.tensordot(self.coeffs, P, axes=(1, 0))


@dataclass(frozen=True)
class CollocationSolves:
    """Node solves ``X_c[:, i] = x(lambda_i)`` with the rule and eigenvectors used."""

    values: np.ndarray
    rule: QuadratureRule
    Q: np.ndarray
    family: Family
    rcond: np.ndarray = None

    @property
    def n(self) -> int:
        return self.rule.n


def dense_solve(M: np.ndarray, rhs: np.ndarray):
    """LU solve with a LAPACK 1-norm reciprocal condition estimate.

    Returns ``(x, rcond)``. Raises nothing; callers decide what rcond is
    acceptable.
    """
    M = np.asarray(M, dtype=float)
    anorm = np.abs(M).sum(axis=0).max() if M.size else 0.0
    lu, piv, info = lapack.dgetrf(M)
    if info > 0:
        return None, 0.0
    rcond, _ = lapack.dgecon(lu, anorm, norm="1")
    x = scipy.linalg.lu_solve((lu, piv), rhs, check_finite=False)
    return x, float(rcond)


def collocate(A: ParamMatrix, b: ParamVector, n: int, family: Family | str = Family.LEGENDRE,
              *, max_workers: int | None = None) -> CollocationSolves:
    """Solve ``A(lambda_i) x = b(lambda_i)`` at each of the n Gauss nodes.

    Node solves are independent and may run on a thread pool; the result
    columns are always in node order.
    """
    if A.N != b.N:
        raise ValueError(f"dimension mismatch: A is {A.N}x{A.N}, b has {b.N} entries")
    family = as_family(family)
    rule, Q = gauss_quadrature(family, n)
    As = A.evaluate_many(rule.nodes, max_workers=max_workers)
    bs = b.evaluate_many(rule.nodes, max_workers=max_workers)

    def one(i):
        x, rcond = dense_solve(As[i], bs[i])
        if x is None or rcond < RCOND_SINGULAR or not np.all(np.isfinite(x)):
            raise NodeSolveError(
                f"A(s) is singular to working precision at node {i} (s = {rule.nodes[i]:.17g}, "
                f"rcond = {rcond:.3e})",
                index=i,
                node=float(rule.nodes[i]),
                rcond=rcond,
            )
        return x, rcond

    if max_workers and max_workers > 1 and n > 1:
        with ThreadPoolExecutor(max_workers=max_workers) as pool:
            results = list(pool.map(one, range(n)))
    else:
        results = [one(i) for i in range(n)]
    values = np.column_stack([x for x, _ in results])
    rcond = np.array([r for _, r in results])
    return CollocationSolves(values, rule, Q, family, rcond)


def barycentric_weights(nodes: np.ndarray) -> np.ndarray:
    """Weights ``1 / prod_{j != i} (x_i - x_j)``, rescaled to max magnitude 1."""
    nodes = np.asarray(nodes, dtype=float)
    diff = nodes[:, None] - nodes[None, :]
    np.fill_diagonal(diff, 1.0)
    # sum logs to stay clear of under/overflow for larger n
    sign = np.prod(np.sign(diff), axis=1)
    logw = -np.sum(np.log(np.abs(diff)), axis=1)
    return sign * np.exp(logw - logw.max())


def evaluate_lagrange(C: CollocationSolves, s) -> np.ndarray:
    """Lagrange interpolant of the node solves, by the barycentric formula.

    At a node the stored column is returned exactly.
    """
    nodes = C.rule.nodes
    w = barycentric_weights(nodes)
    s_arr = np.atleast_1d(np.asarray(s, dtype=float))
    out = np.empty((C.values.shape[0], s_arr.size))
    for k, sk in enumerate(s_arr.ravel()):
        d = sk - nodes
        hit = np.flatnonzero(d == 0.0)
        if hit.size:
            out[:, k] = C.values[:, hit[0]]
            continue
        t = w / d
        out[:, k] = (C.values @ t) / t.sum()
    if np.ndim(s) == 0:
        return out[:, 0]
    return out.reshape((C.values.shape[0],) + np.shape(s))


def to_spectral(C: CollocationSolves) -> SpectralSolution:
    """Basis change ``X_p = X_c diag(q0) Q^T`` (q0 = first row of Q)."""
    n = C.rule.n
    if C.values.shape[1] != n or C.Q.shape != (n, n):
        raise ValueError(
            f"inconsistent collocation data: values {C.values.shape}, Q {C.Q.shape}, {n} nodes"
        )
    coeffs = (C.values * C.Q[0]) @ C.Q.T
    info = {"min_rcond": float(C.rcond.min())} if C.rcond is not None else {}
    return SpectralSolution(coeffs, _table(C.family, n), Method.PSEUDOSPECTRAL, info)


def to_collocation(coeffs: np.ndarray, Q: np.ndarray) -> np.ndarray:
    """Inverse basis change ``X_c = X_p Q diag(q0)^-1``."""
    return (np.asarray(coeffs) @ Q) / Q[0]


def pseudospectral_solve(A: ParamMatrix, b: ParamVector, n: int, family: Family | str = Family.LEGENDRE,
                         *, max_workers: int | None = None) -> SpectralSolution:
    """n-term pseudospectral approximation from n node solves."""
    return to_spectral(collocate(A, b, n, family, max_workers=max_workers))
