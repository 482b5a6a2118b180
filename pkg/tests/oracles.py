"""Independent exact-arithmetic oracles (sympy), used to derive frozen expected values."""

from __future__ import annotations

import sympy as sp

s = sp.Symbol("s", real=True)


def moment(family: str, k: int):
    """Exact <s^k> under the normalized weight."""
    if k % 2:
        return sp.Integer(0)
    if family == "legendre":
        return sp.Rational(1, k + 1)
    j = k // 2
    return sp.binomial(2 * j, j) / sp.Integer(4) ** j


def inner(family: str, p, q):
    poly = sp.Poly(sp.expand(p * q), s)
    return sum(c * moment(family, m[0]) for m, c in zip(poly.monoms(), poly.coeffs()))


def gram_schmidt(family: str, count: int):
    """Orthonormal polynomials from monomials; returns (polys, alpha, beta)."""
    polys = []
    for k in range(count + 1):
        p = s**k
        for q in polys:
            p -= inner(family, p, q) * q
        polys.append(sp.expand(p / sp.sqrt(inner(family, p, p))))
    alpha = [sp.simplify(inner(family, s * p, p)) for p in polys[:count]]
    beta = [sp.Integer(1)] + [sp.simplify(inner(family, s * polys[k - 1], polys[k])) for k in range(1, count)]
    return polys[:count], alpha, beta


def gauss_by_moments(family: str, n: int):
    """Solve <s^k>_n = <s^k>, k < 2n, for nodes/weights symbolically."""
    xs = sp.symbols(f"x0:{n}", real=True)
    ws = sp.symbols(f"w0:{n}", positive=True)
    eqs = [sum(w * x**k for x, w in zip(xs, ws)) - moment(family, k) for k in range(2 * n)]
    sols = sp.solve(eqs, list(xs) + list(ws), dict=True)
    out = []
    for sol in sols:
        nodes = [sp.nsimplify(sol[x]) for x in xs]
        if all(nodes[i] < nodes[i + 1] for i in range(n - 1)):
            out.append((nodes, [sp.nsimplify(sol[w]) for w in ws]))
    return out[0]
