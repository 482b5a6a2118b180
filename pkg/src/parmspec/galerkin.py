"""Spectral Galerkin: assembly and solution of the coupled Nn x Nn system.

The public layout is basis-major: block (i, j) of size N x N is
``<pi_i pi_j A>`` and the unknown is ``vec(X_g)`` (columns of X_g stacked).
The Jacobi-operator route naturally produces the component-major layout
(unknown ``vec(X_g^T)``); :func:`shuffle_permutation` converts between them.

Two assembly routes:

* quadrature with m Gauss points, valid for any evaluator;
* leading n x n minors of ``A_ij(J_m)``, exact for polynomial data once m
  reaches :func:`exactness_order`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import SingularSystemError
from .orthopoly import Family, as_family, eval_basis, gauss_nodes_weights, jacobi_matrix, _table
from .paramops import ParamMatrix, ParamVector, _require_polynomial, operator_on_jacobi, vector_on_jacobi
from .pseudospectral import RCOND_SINGULAR, Method, SpectralSolution, dense_solve

__all__ = [
    "GalerkinSystem",
    "exactness_order",
    "default_quad_order",
    "shuffle_permutation",
    "assemble_quadrature",
    "assemble_jacobi",
    "galerkin_solve",
]


def exactness_order(n: int, m_a: int, m_b: int) -> int:
    """Smallest Gauss order that integrates every Galerkin entry exactly."""
    if n < 1 or m_a < 0 or m_b < 0:
        raise ValueError("need n >= 1 and non-negative degrees")
    return max(math.ceil((m_a + 2 * n - 1) / 2), math.ceil((m_b + n) / 2))


def default_quad_order(n: int) -> int:
    """Quadrature order used for general-form (non-polynomial) data."""
    return 2 * n + 10


def shuffle_permutation(N: int, n: int) -> np.ndarray:
    """Index map from basis-major to component-major ordering.

    ``v_component_major = v_basis_major[perm]``: entry ``i*n + k``
    (component i, basis k) is taken from ``k*N + i``.
    """
    i, k = np.meshgrid(np.arange(N), np.arange(n), indexing="ij")
    return (k * N + i).ravel()


@dataclass(frozen=True)
class GalerkinSystem:
    """Assembled Galerkin system in basis-major layout."""

    matrix: np.ndarray
    rhs: np.ndarray
    N: int
    n: int
    route: str
    m: int

    @property
    def dim(self) -> int:
        return self.N * self.n

    def component_major(self):
        """``(matrix, rhs)`` permuted to the ``vec(X_g^T)`` layout."""
        p = shuffle_permutation(self.N, self.n)
        return self.matrix[np.ix_(p, p)], self.rhs[p]


def assemble_quadrature(A: ParamMatrix, b: ParamVector, n: int, m: int,
                        family: Family | str = Family.LEGENDRE, *, max_workers: int | None = None) -> GalerkinSystem:
    """Galerkin system with every integral replaced by an m-point Gauss sum."""
    if m < 1:
        raise ValueError("quadrature order must be >= 1")
    if A.N != b.N:
        raise ValueError(f"dimension mismatch: A is {A.N}x{A.N}, b has {b.N} entries")
    family = as_family(family)
    rule = gauss_nodes_weights(family, m)
    As = A.evaluate_many(rule.nodes, max_workers=max_workers)  # (m, N, N)
    bs = b.evaluate_many(rule.nodes, max_workers=max_workers)  # (m, N)
    P = eval_basis(_table(family, n), n, rule.nodes)  # (n, m)
    Pw = P * rule.weights
    N = A.N
    matrix = np.einsum("ik,jk,kab->iajb", Pw, P, As, optimize=True).reshape(n * N, n * N)
    rhs = (Pw @ bs).reshape(n * N)
    return GalerkinSystem(matrix, rhs, N, n, "quadrature", m)


def assemble_jacobi(A: ParamMatrix, b: ParamVector, n: int, family: Family | str = Family.LEGENDRE) -> GalerkinSystem:
    """Exact Galerkin system for polynomial data from principal minors of ``A(J_m)``."""
    _require_polynomial(A, "assemble_jacobi")
    _require_polynomial(b, "assemble_jacobi")
    if A.N != b.N:
        raise ValueError(f"dimension mismatch: A is {A.N}x{A.N}, b has {b.N} entries")
    family = as_family(family)
    N = A.N
    m = exactness_order(n, A.degree, b.degree)
    J = jacobi_matrix(_table(family, m), m)
    big = operator_on_jacobi(A, J).reshape(N, m, N, m)[:, :n, :, :n]
    rhs_cm = vector_on_jacobi(b, J).reshape(N, m, m)[:, :n, 0]
    # component-major -> basis-major
    matrix = big.transpose(1, 0, 3, 2).reshape(n * N, n * N)
    rhs = rhs_cm.T.reshape(n * N)
    return GalerkinSystem(matrix, rhs, N, n, "jacobi", m)


def galerkin_solve(A: ParamMatrix, b: ParamVector, n: int, family: Family | str = Family.LEGENDRE,
                   *, m: int | None = None, max_workers: int | None = None) -> SpectralSolution:
    """n-term Galerkin approximation.

    Polynomial data goes through the exact Jacobi-operator route unless an
    explicit ``m`` is given; anything else is assembled by quadrature with
    ``m`` points (default ``2n + 10``).
    """
    family = as_family(family)
    if m is None and A.is_polynomial and b.is_polynomial:
        system = assemble_jacobi(A, b, n, family)
    else:
        system = assemble_quadrature(A, b, n, default_quad_order(n) if m is None else m, family,
                                     max_workers=max_workers)
    x, rcond = dense_solve(system.matrix, system.rhs)
    if x is None or rcond < RCOND_SINGULAR or not np.all(np.isfinite(x)):
        raise SingularSystemError(
            f"Galerkin system ({system.dim}x{system.dim}, {system.route} route, m={system.m}) is singular "
            f"to working precision (rcond = {rcond:.3e}); A(s) may be singular on [-1, 1] or m too small",
            rcond=rcond,
        )
    coeffs = x.reshape(n, A.N).T
    info = {"route": system.route, "m": system.m, "rcond": rcond}
    return SpectralSolution(coeffs, _table(family, n), Method.GALERKIN, info)
