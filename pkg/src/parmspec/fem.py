"""Piecewise-linear FEM for the parameterized two-point boundary value problem

    d/dt( alpha(s, t) du/dt ) = 1,  u(0) = u(1) = 0,
    alpha(s, t) = 1 + 4 cos(pi s) (t^2 - t),   s in [eps, 1].

The stiffness matrix splits as ``K0 + cos(pi s) K1``. Everything else in the
package works on [-1, 1], so the problem is exposed in the reference variable
u through the affine map ``s = (1 + eps)/2 + (1 - eps)/2 * u``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .paramops import ParamMatrix, ParamVector

__all__ = ["FemProblem", "assemble_fem"]


def _tri(diag, off) -> np.ndarray:
    return np.diag(diag) + np.diag(off, 1) + np.diag(off, -1)


@dataclass(frozen=True)
class FemProblem:
    n_elements: int
    eps: float
    mesh: np.ndarray
    K0: np.ndarray
    K1: np.ndarray
    load: np.ndarray  # integral of each interior hat function against the forcing 1

    @property
    def h(self) -> float:
        return 1.0 / self.n_elements

    @property
    def N(self) -> int:
        return self.n_elements - 1

    @property
    def interior(self) -> np.ndarray:
        return self.mesh[1:-1]

    def to_physical(self, u):
        """Reference u in [-1, 1] -> physical s in [eps, 1]."""
        return 0.5 * (1.0 + self.eps) + 0.5 * (1.0 - self.eps) * np.asarray(u, dtype=float)

    def to_reference(self, s):
        return (2.0 * np.asarray(s, dtype=float) - (1.0 + self.eps)) / (1.0 - self.eps)

    def stiffness(self, s: float) -> np.ndarray:
        """``K0 + cos(pi s) K1`` at physical s."""
        return self.K0 + np.cos(np.pi * s) * self.K1

    @property
    def rhs(self) -> np.ndarray:
        # weak form of (alpha u')' = 1 gives (K0 + cos K1) x = -load
        return -self.load

    def param_matrix(self) -> ParamMatrix:
        """General-form A(u) in the reference variable."""
        K0, K1 = self.K0, self.K1
        to_s = self.to_physical
        return ParamMatrix.general(lambda u: K0 + np.cos(np.pi * to_s(u)) * K1, self.N)

    def param_vector(self) -> ParamVector:
        return ParamVector.polynomial([self.rhs])

    def exact_solution(self, s: float) -> np.ndarray:
        """Continuous solution at the interior mesh nodes, physical s."""
        c = np.cos(np.pi * s)
        t = self.interior
        return np.log1p(4.0 * c * (t * t - t)) / (8.0 * c)


def assemble_fem(n_elements: int, eps: float) -> FemProblem:
    """Uniform-mesh P1 stiffness pieces and load for the interior unknowns.

    Element integrals of ``t^2 - t`` use the exact antiderivative.
    """
    if n_elements < 2:
        raise ValueError("need at least 2 elements")
    if not 0.0 < eps < 1.0:
        raise ValueError("eps must lie in (0, 1)")
    h = 1.0 / n_elements
    mesh = np.linspace(0.0, 1.0, n_elements + 1)

    def antiderivative(t):
        return t**3 / 3.0 - t**2 / 2.0

    # per-element value of 4 * int (t^2 - t) dt times |grad phi|^2 = 1/h^2
    coef = 4.0 * (antiderivative(mesh[1:]) - antiderivative(mesh[:-1])) / h**2

    N = n_elements - 1
    K0 = _tri(np.full(N, 2.0 / h), np.full(N - 1, -1.0 / h))
    # interior node i (mesh index i+1) touches elements i and i+1
    K1 = _tri(coef[:-1] + coef[1:], -coef[1:-1])
    load = np.full(N, h)
    return FemProblem(n_elements, float(eps), mesh, K0, K1, load)
