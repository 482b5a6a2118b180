import numpy as np
import pytest

from parmspec import ParamMatrix, ParamVector


def random_problem(rng, N=None, m_a=None, m_b=None):
    """Random polynomial problem that stays well conditioned on [-1, 1].

    A_0 = N I plus small noise dominates the higher coefficients, whose
    combined norm is kept below 1.
    """
    N = int(rng.integers(1, 6)) if N is None else N
    m_a = int(rng.integers(0, 4)) if m_a is None else m_a
    m_b = int(rng.integers(0, 4)) if m_b is None else m_b
    A = [N * np.eye(N) + 0.1 * rng.standard_normal((N, N))]
    for _ in range(m_a):
        A.append(rng.uniform(-1, 1, (N, N)) / (N * (m_a + 1)))
    # force the leading coefficient to be nonzero so the degree is tight
    if m_a:
        A[-1][0, 0] += 0.1
    b = [rng.standard_normal(N) for _ in range(m_b + 1)]
    b[-1][0] += 1.0
    return ParamMatrix.polynomial(A), ParamVector.polynomial(b)


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


@pytest.fixture(scope="session")
def problem_set():
    """The fixed set of 20 random problems shared by the cross-method checks."""
    rng = np.random.default_rng(7)
    out = []
    for _ in range(20):
        A, b = random_problem(rng)
        out.append((A, b, int(rng.integers(1, 13))))
    return out


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number, title, ok, detail in sorted(RESULTS):
        terminalreporter.write_line(f"C{number:02d} {'PASS' if ok else 'FAIL'}  {title}  {detail}")
