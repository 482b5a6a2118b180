"""Matrix- and vector-valued functions of the parameter s.

Two representations are supported:

* polynomial form, ``A(s) = A_0 + A_1 s + ... + A_m s^m`` (dense coefficients);
* general form, an arbitrary evaluator ``s -> array``.

General evaluators must be pure: the same ``s`` always yields the same
array, and concurrent calls are allowed. Nothing checks this.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Sequence

import numpy as np

from .errors import EvaluationError, UnsupportedFormError
from .orthopoly import Family, JacobiMatrix, _sorted_decomposition, eval_basis, gauss_nodes_weights, _table

__all__ = [
    "ParamMatrix",
    "ParamVector",
    "eval_matrix",
    "eval_vector",
    "operator_on_jacobi",
    "vector_on_jacobi",
    "truncate_general_to_polynomial",
    "monomial_coefficients",
]

_TRIM_RTOL = 1e-13


class _ParamFunction:
    _ndim: int

    def __init__(self, coeffs=None, evaluator=None, *, shape=None, analytic: bool = True):
        if (coeffs is None) == (evaluator is None):
            raise ValueError("give exactly one of coeffs or evaluator")
        if coeffs is not None:
            stack = np.array([np.asarray(c, dtype=float) for c in coeffs])
            if stack.ndim != self._ndim + 1 or stack.shape[0] == 0:
                raise ValueError(f"coefficients must be a non-empty list of {self._ndim}-d arrays")
            if self._ndim == 2 and stack.shape[1] != stack.shape[2]:
                raise ValueError(f"coefficient matrices must be square, got {stack.shape[1:]}")
            nonzero = [k for k in range(stack.shape[0]) if np.any(stack[k] != 0.0)]
            stack = stack[: (nonzero[-1] + 1 if nonzero else 1)].copy()
            stack.setflags(write=False)
            self._coeffs = stack
            self._evaluator = None
            self._shape = stack.shape[1:]
        else:
            if shape is None:
                raise ValueError("general form needs an explicit shape")
            self._coeffs = None
            self._evaluator = evaluator
            self._shape = tuple(shape)
        self.analytic = analytic

    @classmethod
    def polynomial(cls, coeffs: Sequence):
        """Power-series coefficients, lowest degree first."""
        return cls(coeffs=coeffs)

    @property
    def is_polynomial(self) -> bool:
        return self._coeffs is not None

    @property
    def N(self) -> int:
        return self._shape[0]

    @property
    def shape(self) -> tuple:
        return self._shape

    @property
    def coeffs(self) -> np.ndarray:
        if self._coeffs is None:
            raise UnsupportedFormError(f"{type(self).__name__} is in general form; it has no coefficients")
        return self._coeffs

    @property
    def degree(self) -> int | None:
        """Tight polynomial degree, or None for general form."""
        return None if self._coeffs is None else self._coeffs.shape[0] - 1

    def __call__(self, s: float) -> np.ndarray:
        if self._coeffs is not None:
            # Horner
            out = self._coeffs[-1].copy()
            for c in self._coeffs[-2::-1]:
                out *= s
                out += c
            return out
        out = np.asarray(self._evaluator(float(s)), dtype=float)
        if out.shape != self._shape:
            raise ValueError(f"evaluator returned shape {out.shape}, expected {self._shape}")
        return out

    def evaluate_many(self, points, *, max_workers: int | None = None) -> np.ndarray:
        """Stack of values at each point, shape (len(points), *shape).

        Polynomial forms are evaluated in one vectorized Horner pass. General
        forms are called once per point, optionally on a thread pool; results
        are always stored in point order.
        """
        points = np.asarray(points, dtype=float)
        if self._coeffs is not None:
            expand = (slice(None),) + (None,) * self._ndim
            out = np.broadcast_to(self._coeffs[-1], (points.size,) + self._shape).copy()
            for c in self._coeffs[-2::-1]:
                out *= points[expand]
                out += c
            return out

        def one(k):
            try:
                return self(points[k])
            except Exception as exc:
                raise EvaluationError(
                    f"evaluator failed at node {k} (s = {points[k]!r}): {exc}", index=k, node=float(points[k])
                ) from exc

        if max_workers and max_workers > 1 and points.size > 1:
            with ThreadPoolExecutor(max_workers=max_workers) as pool:
                values = list(pool.map(one, range(points.size)))
        else:
            values = [one(k) for k in range(points.size)]
        return np.array(values).reshape((points.size,) + self._shape)

    def __add__(self, other):
        if not (self.is_polynomial and other.is_polynomial):
            return type(self).general(lambda s: self(s) + other(s), self.N, analytic=self.analytic and other.analytic)
        a, b = self.coeffs, other.coeffs
        k = max(a.shape[0], b.shape[0])
        out = np.zeros((k,) + self._shape)
        out[: a.shape[0]] += a
        out[: b.shape[0]] += b
        return type(self).polynomial(out)

    def __repr__(self):
        form = f"degree={self.degree}" if self.is_polynomial else "general"
        return f"{type(self).__name__}(N={self.N}, {form})"


class ParamMatrix(_ParamFunction):
    """Square matrix-valued function A(s)."""

    _ndim = 2

    @classmethod
    def general(cls, evaluator: Callable[[float], np.ndarray], N: int, *, analytic: bool = True):
        return cls(evaluator=evaluator, shape=(N, N), analytic=analytic)


class ParamVector(_ParamFunction):
    """Vector-valued function b(s)."""

    _ndim = 1

    @classmethod
    def general(cls, evaluator: Callable[[float], np.ndarray], N: int, *, analytic: bool = True):
        return cls(evaluator=evaluator, shape=(N,), analytic=analytic)


def eval_matrix(A: ParamMatrix, s: float) -> np.ndarray:
    return A(s)


def eval_vector(b: ParamVector, s: float) -> np.ndarray:
    return b(s)


def _require_polynomial(f, what: str):
    if not f.is_polynomial:
        raise UnsupportedFormError(
            f"{what} needs polynomial-form data; assemble general-form problems by quadrature "
            "(galerkin.assemble_quadrature) or truncate them first"
        )


def operator_on_jacobi(A: ParamMatrix, J: JacobiMatrix) -> np.ndarray:
    """Block matrix whose (i, j) block of size m x m is ``A_ij(J)``.

    The result is laid out component-major: row ``i*m + k`` belongs to
    component i and basis index k. One eigendecomposition of J is shared by
    all N^2 scalar polynomials.
    """
    _require_polynomial(A, "operator_on_jacobi")
    lam, Q = _sorted_decomposition(J, True)
    vals = A.evaluate_many(lam)  # (m, N, N)
    N, m = A.N, J.n
    blocks = np.einsum("ak,kij,bk->iajb", Q, vals, Q, optimize=True)
    return blocks.reshape(N * m, N * m)


def vector_on_jacobi(b: ParamVector, J: JacobiMatrix) -> np.ndarray:
    """Stacked ``b_i(J)`` blocks, shape (N*m, m)."""
    _require_polynomial(b, "vector_on_jacobi")
    lam, Q = _sorted_decomposition(J, True)
    vals = b.evaluate_many(lam)  # (m, N)
    blocks = np.einsum("ak,ki,bk->iab", Q, vals, Q, optimize=True)
    return blocks.reshape(b.N * J.n, J.n)


def monomial_coefficients(family: Family | str, n: int) -> np.ndarray:
    """Row k holds the power-series coefficients of pi_k (lowest degree first)."""
    table = _table(family, n)
    C = np.zeros((n, n))
    C[0, 0] = 1.0
    if n > 1:
        a, b = table.alpha, table.beta
        C[1, 1] = 1.0 / b[1]
        C[1, 0] = -a[0] / b[1]
        for k in range(1, n - 1):
            C[k + 1, 1:] = C[k, :-1]
            C[k + 1] -= a[k] * C[k] + b[k] * C[k - 1]
            C[k + 1] /= b[k + 1]
    return C


def truncate_general_to_polynomial(f, degree: int, family: Family | str = Family.LEGENDRE):
    """Degree-``degree`` interpolant of a general-form function.

    Interpolates entrywise at the (degree+1)-point Gauss rule of ``family``.
    The interpolant is first expanded in the orthonormal basis (exact
    discrete transform) and then converted to power-series coefficients.
    Coefficients below ``1e-13`` times the largest sampled magnitude are
    treated as round-off and zeroed, so the returned degree is tight.
    """
    if f.is_polynomial:
        return f
    if degree < 0:
        raise ValueError("degree must be >= 0")
    q = degree + 1
    rule = gauss_nodes_weights(family, q)
    vals = f.evaluate_many(rule.nodes)  # (q, *shape)
    P = eval_basis(_table(family, q), q, rule.nodes)  # (q basis, q nodes)
    ortho = np.tensordot(P * rule.weights, vals, axes=(1, 0))  # (q basis, *shape)
    mono = np.tensordot(monomial_coefficients(family, q).T, ortho, axes=(1, 0))
    # round-off left by the basis change would otherwise defeat degree trimming
    mono[np.abs(mono) <= _TRIM_RTOL * max(np.abs(vals).max(), np.finfo(float).tiny)] = 0.0
    return type(f).polynomial(mono)
