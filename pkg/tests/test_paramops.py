import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from parmspec.demos import two_by_two
from parmspec.errors import EvaluationError, UnsupportedFormError
from parmspec.fem import assemble_fem
from parmspec.orthopoly import jacobi_matrix, recurrence_table
from parmspec.paramops import (
    ParamMatrix,
    ParamVector,
    eval_matrix,
    eval_vector,
    monomial_coefficients,
    operator_on_jacobi,
    truncate_general_to_polynomial,
    vector_on_jacobi,
)

GRID = np.linspace(-1, 1, 1000)


def J(n, family="legendre"):
    return jacobi_matrix(recurrence_table(family, max(n, 1)), n)


def test_eval_two_by_two():
    A, b = two_by_two(1.0)
    np.testing.assert_array_equal(eval_matrix(A, 0.0), [[2, 0], [0, 1]])
    np.testing.assert_array_equal(eval_vector(b, 0.7), [2, 1])


def test_constant_matrix():
    A0 = np.array([[1.0, 2.0], [3.0, 4.0]])
    A = ParamMatrix.polynomial([A0])
    for s in (-1.0, 0.2, 5.0):
        np.testing.assert_array_equal(A(s), A0)


def test_fem_matrix_at_half():
    fem = assemble_fem(8, 0.2)
    A = fem.param_matrix()
    u = fem.to_reference(0.5)
    np.testing.assert_allclose(A(u), fem.K0, atol=1e-14)


def test_trailing_zeros_trimmed():
    A = ParamMatrix.polynomial([np.eye(2), np.ones((2, 2)), np.zeros((2, 2)), np.zeros((2, 2))])
    assert A.degree == 1 and A.coeffs.shape == (2, 2, 2)
    z = ParamVector.polynomial([np.zeros(3), np.zeros(3)])
    assert z.degree == 0


def test_constructor_validation():
    with pytest.raises(ValueError):
        ParamMatrix.polynomial([np.ones((2, 3))])
    with pytest.raises(ValueError):
        ParamMatrix(coeffs=[np.eye(2)], evaluator=lambda s: np.eye(2))
    with pytest.raises(ValueError):
        ParamMatrix.general(lambda s: np.eye(3), 2)(0.0)


def test_general_form_has_no_coeffs():
    A = ParamMatrix.general(lambda s: np.eye(2) * (1 + s * s), 2)
    assert not A.is_polynomial and A.degree is None
    with pytest.raises(UnsupportedFormError):
        A.coeffs
    with pytest.raises(UnsupportedFormError):
        operator_on_jacobi(A, J(3))


def test_evaluate_many_wraps_failures():
    def bad(s):
        if s > 0:
            raise RuntimeError("boom")
        return np.eye(1)

    A = ParamMatrix.general(bad, 1)
    with pytest.raises(EvaluationError) as info:
        A.evaluate_many([-0.5, 0.25, 0.5])
    assert info.value.index == 1 and info.value.node == 0.25


def test_evaluate_many_threads_keep_order():
    A = ParamMatrix.general(lambda s: np.array([[s]]), 1)
    pts = np.linspace(-1, 1, 33)
    np.testing.assert_array_equal(A.evaluate_many(pts, max_workers=4)[:, 0, 0], pts)


def test_add():
    A = ParamMatrix.polynomial([np.eye(2), np.ones((2, 2))])
    B = ParamMatrix.polynomial([np.eye(2)])
    C = A + B
    assert C.degree == 1
    np.testing.assert_allclose(C(0.3), A(0.3) + B(0.3))
    G = A + ParamMatrix.general(lambda s: np.full((2, 2), s), 2)
    np.testing.assert_allclose(G(0.3), A(0.3) + 0.3)


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), deg=st.integers(0, 6))
def test_horner_matches_power_sum(seed, deg):
    rng = np.random.default_rng(seed)
    coeffs = rng.standard_normal((deg + 1, 3, 3))
    A = ParamMatrix.polynomial(coeffs)
    s = rng.uniform(-1, 1, 50)
    naive = np.einsum("k...,kp->p...", coeffs, s[None, :] ** np.arange(deg + 1)[:, None])
    scale = np.abs(coeffs).sum(axis=0)
    assert np.all(np.abs(A.evaluate_many(s) - naive) <= 1e-13 * (1 + scale))
    np.testing.assert_allclose(A(s[0]), naive[0], rtol=1e-13, atol=1e-13)


def test_operator_identity():
    op = operator_on_jacobi(ParamMatrix.polynomial([np.eye(2)]), J(4))
    np.testing.assert_allclose(op, np.eye(8), atol=1e-14)


def test_operator_offdiagonal_linear():
    A = ParamMatrix.polynomial([np.zeros((2, 2)), [[0, 1], [1, 0]]])
    J2 = J(2)
    op = operator_on_jacobi(A, J2).reshape(2, 2, 2, 2)
    np.testing.assert_allclose(op[0, :, 1, :], J2.to_dense(), atol=1e-15)
    np.testing.assert_allclose(op[1, :, 0, :], J2.to_dense(), atol=1e-15)
    np.testing.assert_allclose(op[0, :, 0, :], 0, atol=1e-15)


def test_operator_two_by_two_blocks():
    A, _ = two_by_two(1.0)
    J2 = J(2).to_dense()
    I = np.eye(2)
    expected = np.block([[2 * I, J2], [J2, I]])
    np.testing.assert_allclose(operator_on_jacobi(A, J(2)), expected, atol=1e-15)


@pytest.mark.parametrize("family", ["legendre", "chebyshev"])
def test_operator_linear_in_A(rng, family):
    A = ParamMatrix.polynomial(rng.standard_normal((4, 3, 3)))
    B = ParamMatrix.polynomial(rng.standard_normal((2, 3, 3)))
    Jm = J(6, family)
    lhs = operator_on_jacobi(A + B, Jm)
    np.testing.assert_allclose(lhs, operator_on_jacobi(A, Jm) + operator_on_jacobi(B, Jm), atol=1e-12)


def test_operator_degree_one_structure(rng):
    A = ParamMatrix.polynomial(rng.standard_normal((2, 3, 3)))
    m = 5
    Jm = J(m).to_dense()
    op = operator_on_jacobi(A, J(m)).reshape(3, m, 3, m)
    for i in range(3):
        for j in range(3):
            expected = A.coeffs[0][i, j] * np.eye(m) + A.coeffs[1][i, j] * Jm
            np.testing.assert_allclose(op[i, :, j, :], expected, atol=1e-13)


def test_vector_on_jacobi_constant():
    b = ParamVector.polynomial([[2.0, -1.0]])
    out = vector_on_jacobi(b, J(3)).reshape(2, 3, 3)
    np.testing.assert_allclose(out[0], 2 * np.eye(3), atol=1e-14)
    np.testing.assert_allclose(out[1], -np.eye(3), atol=1e-14)


@pytest.mark.parametrize("family", ["legendre", "chebyshev"])
def test_monomial_coefficients_match_gram_schmidt(family):
    import sympy as sp

    from oracles import gram_schmidt, s

    polys, _, _ = gram_schmidt(family, 6)
    C = monomial_coefficients(family, 6)
    for k, p in enumerate(polys):
        expected = [float(c) for c in reversed(sp.Poly(p, s).all_coeffs())]
        np.testing.assert_allclose(C[k, : k + 1], expected, atol=1e-13)
        assert np.all(C[k, k + 1:] == 0)


def test_truncate_recovers_linear():
    A0 = np.array([[1.0, 2.0], [0.5, 3.0]])
    A1 = np.array([[0.25, -1.0], [2.0, 0.0]])
    G = ParamMatrix.general(lambda s: A0 + s * A1, 2)
    P = truncate_general_to_polynomial(G, 1)
    assert P.degree == 1
    np.testing.assert_allclose(P.coeffs, [A0, A1], atol=1e-13)


def test_truncate_constant_trims_degree():
    G = ParamMatrix.general(lambda s: np.array([[3.0, 1.0], [1.0, 2.0]]), 2)
    assert truncate_general_to_polynomial(G, 5).degree == 0


def test_truncate_passthrough_for_polynomial():
    A = ParamMatrix.polynomial([np.eye(2)])
    assert truncate_general_to_polynomial(A, 3) is A


def test_truncate_vector():
    g = ParamVector.general(lambda s: np.array([s**2, 1.0]), 2)
    p = truncate_general_to_polynomial(g, 4)
    np.testing.assert_allclose(p.coeffs, [[0, 1], [0, 0], [1, 0]], atol=1e-13)


# Frozen by evaluating the degree-8 interpolant at the 9 Legendre-Gauss
# nodes against cos(pi s) on the grid (numpy.polyfit through the same nodes
# gives 2.1474e-4 as well).
COS_D8_LEGENDRE_MAXERR = 2.1473601062493852e-04


def test_truncate_cos_degree_8():
    G = ParamMatrix.general(lambda s: np.array([[np.cos(np.pi * s)]]), 1)
    err = np.abs(truncate_general_to_polynomial(G, 8).evaluate_many(GRID)[:, 0, 0] - np.cos(np.pi * GRID)).max()
    assert err == pytest.approx(COS_D8_LEGENDRE_MAXERR, rel=1e-6)
    cheb = truncate_general_to_polynomial(G, 8, "chebyshev")
    err_cheb = np.abs(cheb.evaluate_many(GRID)[:, 0, 0] - np.cos(np.pi * GRID)).max()
    assert err_cheb <= 1e-4


def test_truncate_cos_converges():
    G = ParamMatrix.general(lambda s: np.array([[np.cos(np.pi * s)]]), 1)
    errs = [
        np.abs(truncate_general_to_polynomial(G, d).evaluate_many(GRID)[:, 0, 0] - np.cos(np.pi * GRID)).max()
        for d in (4, 8, 12, 16)
    ]
    assert errs == sorted(errs, reverse=True)
    assert errs[-1] < 1e-10
