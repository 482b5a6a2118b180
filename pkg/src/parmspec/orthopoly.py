"""Orthonormal polynomials, Jacobi matrices and Gauss quadrature.

All weights are normalized so that ``<1> = 1``: the uniform weight on
[-1, 1] is 1/2 and the Chebyshev weight is ``1 / (pi * sqrt(1 - s**2))``.
The orthonormal family {pi_k} then satisfies

    beta_{k+1} pi_{k+1}(s) = (s - alpha_k) pi_k(s) - beta_k pi_{k-1}(s)

with pi_{-1} = 0 and pi_0 = 1. Gauss rules come from the eigendecomposition
of the Jacobi matrix (Golub-Welsch), computed with a dedicated implicit-shift
QL iteration.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from typing import Callable

import numpy as np

from .errors import ConfigurationError, ConvergenceError, InsufficientCoefficientsError

__all__ = [
    "Family",
    "RecurrenceTable",
    "JacobiMatrix",
    "QuadratureRule",
    "as_family",
    "recurrence_table",
    "jacobi_matrix",
    "tridiagonal_eigh",
    "gauss_rule",
    "gauss_quadrature",
    "gauss_nodes_weights",
    "eval_basis",
    "quad_integrate",
    "matrix_function",
    "matrix_function_quad",
]


class Family(str, Enum):
    LEGENDRE = "legendre"
    CHEBYSHEV = "chebyshev"


def as_family(value: Family | str) -> Family:
    """Coerce a family name (as used in problem files) to :class:`Family`."""
    if isinstance(value, Family):
        return value
    try:
        return Family(str(value).lower())
    except ValueError:
        choices = ", ".join(f.value for f in Family)
        raise ConfigurationError(f"unsupported polynomial family {value!r} (expected one of: {choices})") from None


def _frozen(a) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class RecurrenceTable:
    """Recurrence coefficients ``alpha_k``, ``beta_k`` for k < length.

    ``beta[0]`` carries the total mass of the weight (always 1 here) and
    takes no part in the recurrence.
    """

    family: Family
    alpha: np.ndarray
    beta: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "alpha", _frozen(self.alpha))
        object.__setattr__(self, "beta", _frozen(self.beta))
        if self.alpha.shape != self.beta.shape:
            raise ValueError("alpha and beta must have the same length")
        if np.any(self.beta[1:] <= 0):
            raise ValueError("recurrence requires beta_k > 0 for k >= 1")

    @property
    def length(self) -> int:
        return self.alpha.shape[0]

    def require(self, n: int) -> None:
        if n < 1:
            raise ValueError(f"order must be >= 1, got {n}")
        if n > self.length:
            raise InsufficientCoefficientsError(
                f"{self.family.value} table holds {self.length} coefficients, {n} requested"
            )


def recurrence_table(family: Family | str, count: int) -> RecurrenceTable:
    """Closed-form recurrence coefficients for a built-in family.

    Parameters
    ----------
    family : Family or str
        ``"legendre"`` (uniform weight) or ``"chebyshev"`` (first kind).
    count : int
        Number of (alpha_k, beta_k) pairs, k = 0..count-1.
    """
    family = as_family(family)
    if count < 1:
        raise ValueError(f"count must be >= 1, got {count}")
    k = np.arange(count, dtype=float)
    alpha = np.zeros(count)
    beta = np.ones(count)
    if family is Family.LEGENDRE:
        beta[1:] = k[1:] / np.sqrt(4.0 * k[1:] ** 2 - 1.0)
    else:
        beta[1:] = 0.5
        if count > 1:
            beta[1] = math.sqrt(0.5)
    return RecurrenceTable(family, alpha, beta)


@lru_cache(maxsize=None)
def _cached_table(family: Family, count: int) -> RecurrenceTable:
    return recurrence_table(family, count)


def _table(family: Family | str, n: int) -> RecurrenceTable:
    # round up so nearby orders share one cached table
    return _cached_table(as_family(family), max(64, 1 << (n - 1).bit_length()))


@dataclass(frozen=True)
class JacobiMatrix:
    """Symmetric tridiagonal matrix of recurrence coefficients."""

    diag: np.ndarray
    offdiag: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "diag", _frozen(self.diag))
        object.__setattr__(self, "offdiag", _frozen(self.offdiag))
        if self.offdiag.shape[0] != max(self.diag.shape[0] - 1, 0):
            raise ValueError("offdiag must have exactly n-1 entries")

    @property
    def n(self) -> int:
        return self.diag.shape[0]

    def to_dense(self) -> np.ndarray:
        return np.diag(self.diag) + np.diag(self.offdiag, 1) + np.diag(self.offdiag, -1)


def jacobi_matrix(table: RecurrenceTable, n: int) -> JacobiMatrix:
    table.require(n)
    return JacobiMatrix(table.alpha[:n], table.beta[1:n])


@dataclass(frozen=True)
class QuadratureRule:
    """Gauss nodes (ascending) and their positive weights."""

    nodes: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "nodes", _frozen(self.nodes))
        object.__setattr__(self, "weights", _frozen(self.weights))
        if self.nodes.shape != self.weights.shape:
            raise ValueError("nodes and weights must have the same length")

    @property
    def n(self) -> int:
        return self.nodes.shape[0]


def tridiagonal_eigh(diag, offdiag, *, vectors: bool = True, max_iter: int = 30):
    """Eigendecomposition of a symmetric tridiagonal matrix.

    Implicit QL iteration with Wilkinson shifts, deflating whenever an
    off-diagonal entry becomes negligible next to its diagonal neighbours.

    Parameters
    ----------
    diag : array_like, shape (n,)
    offdiag : array_like, shape (n-1,)
    vectors : bool
        When False only the first row of the eigenvector matrix is
        accumulated (all a Gauss rule needs), which is much cheaper.
    max_iter : int
        QL sweeps allowed per eigenvalue.

    Returns
    -------
    eigenvalues : ndarray, shape (n,)
        Unsorted.
    Z : ndarray, shape (n, n) or (1, n)
        Eigenvectors in columns (or only their first components).
    """
    d = [float(x) for x in diag]
    n = len(d)
    e = [float(x) for x in offdiag] + [0.0]
    if len(e) != n:
        raise ValueError("offdiag must have exactly n-1 entries")
    # rows of zt are the columns of Z, so each rotation touches two rows
    zt = np.eye(n) if vectors else np.eye(n)[:, :1].copy()
    z0 = zt[:, 0].tolist() if not vectors else None

    for l in range(n):
        it = 0
        while True:
            m = l
            while m < n - 1:
                dd = abs(d[m]) + abs(d[m + 1])
                if abs(e[m]) + dd == dd:
                    break
                m += 1
            if m == l:
                break
            if it == max_iter:
                raise ConvergenceError(
                    f"tridiagonal QL failed to converge for eigenvalue {l} after {it} sweeps "
                    f"(|offdiag| = {abs(e[l]):.3e})",
                    index=l,
                    iterations=it,
                    offdiag=abs(e[l]),
                )
            it += 1
            g = (d[l + 1] - d[l]) / (2.0 * e[l])
            r = math.hypot(g, 1.0)
            g = d[m] - d[l] + e[l] / (g + math.copysign(r, g))
            s = c = 1.0
            p = 0.0
            underflow = False
            for i in range(m - 1, l - 1, -1):
                f = s * e[i]
                b = c * e[i]
                r = math.hypot(f, g)
                e[i + 1] = r
                if r == 0.0:
                    d[i + 1] -= p
                    e[m] = 0.0
                    underflow = True
                    break
                s = f / r
                c = g / r
                g = d[i + 1] - p
                r = (d[i] - g) * s + 2.0 * c * b
                p = s * r
                d[i + 1] = g + p
                g = c * r - b
                if z0 is not None:
                    zi = z0[i]
                    z0[i] = c * zi - s * z0[i + 1]
                    z0[i + 1] = s * zi + c * z0[i + 1]
                else:
                    zi = zt[i].copy()
                    zt[i] = c * zi - s * zt[i + 1]
                    zt[i + 1] = s * zi + c * zt[i + 1]
            if underflow:
                continue
            d[l] -= p
            e[l] = g
            e[m] = 0.0

    if z0 is not None:
        return np.array(d), np.array(z0)[None, :]
    return np.array(d), zt.T.copy()


def _sorted_decomposition(J: JacobiMatrix, vectors: bool):
    lam, Z = tridiagonal_eigh(J.diag, J.offdiag, vectors=vectors)
    order = np.argsort(lam, kind="stable")
    lam = lam[order]
    Z = Z[:, order]
    # fix signs so the first row is positive; weights only see squares
    Z = Z * np.where(Z[0] < 0.0, -1.0, 1.0)
    return lam, Z


def gauss_rule(J: JacobiMatrix, *, vectors: bool = True):
    """Gauss rule of a Jacobi matrix plus its eigenvector matrix.

    Returns
    -------
    rule : QuadratureRule
        Nodes are the eigenvalues in ascending order; weight i is the square
        of the first component of eigenvector i.
    Q : ndarray, shape (n, n)
        Orthogonal eigenvector matrix with strictly positive first row, or
        ``None`` when ``vectors=False``.
    """
    lam, Z = _sorted_decomposition(J, vectors)
    rule = QuadratureRule(lam, Z[0] ** 2)
    if not vectors:
        return rule, None
    Z.setflags(write=False)
    return rule, Z


@lru_cache(maxsize=256)
def _cached_gauss(family: Family, n: int):
    return gauss_rule(jacobi_matrix(_table(family, n), n))


def gauss_quadrature(family: Family | str, n: int):
    """Cached ``gauss_rule`` for the n-point rule of a built-in family."""
    return _cached_gauss(as_family(family), n)


@lru_cache(maxsize=256)
def _cached_rule(family: Family, n: int) -> QuadratureRule:
    return gauss_rule(jacobi_matrix(_table(family, n), n), vectors=False)[0]


def gauss_nodes_weights(family: Family | str, n: int) -> QuadratureRule:
    """Cached n-point Gauss rule without the eigenvector matrix (cheap for large n)."""
    return _cached_rule(as_family(family), n)


def eval_basis(table: RecurrenceTable, n: int, s) -> np.ndarray:
    """Values of pi_0..pi_{n-1} by forward recurrence.

    Scalar ``s`` gives shape (n,); an array of shape S gives (n, *S).
    Outside [-1, 1] the recurrence still runs, but the values grow
    geometrically and lose relative accuracy.
    """
    table.require(n)
    s = np.asarray(s, dtype=float)
    P = np.empty((n,) + s.shape)
    P[0] = 1.0
    if n > 1:
        a, b = table.alpha, table.beta
        P[1] = (s - a[0]) / b[1]
        for k in range(1, n - 1):
            P[k + 1] = ((s - a[k]) * P[k] - b[k] * P[k - 1]) / b[k + 1]
    return P


def quad_integrate(rule: QuadratureRule, f: Callable[[float], float]) -> float:
    """``sum_i f(lambda_i) nu_i``."""
    values = np.array([f(x) for x in rule.nodes], dtype=float)
    return float(values @ rule.weights)


def matrix_function(J: JacobiMatrix, f: Callable[[float], float]) -> np.ndarray:
    """``f(J) = Q f(Lambda) Q^T`` for a scalar function f."""
    lam, Q = _sorted_decomposition(J, True)
    fl = np.array([f(x) for x in lam], dtype=float)
    return (Q * fl) @ Q.T


def matrix_function_quad(table: RecurrenceTable, n: int, f: Callable[[float], float]) -> np.ndarray:
    """``f(J_n)``, whose (i, j) entry equals the n-point Gauss sum of f pi_i pi_j."""
    return matrix_function(jacobi_matrix(table, n), f)
