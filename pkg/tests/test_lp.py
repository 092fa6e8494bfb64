from fractions import Fraction

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.optimize import linprog

from batsp.lp import phase1, rational_rank


def test_feasible_system():
    A = np.array([[1.0, 1.0, 0.0], [0.0, 1.0, 1.0]])
    b = np.array([1.0, 1.0])
    res = phase1(A, b)
    assert res.residual <= 1e-12
    assert np.allclose(A @ res.y, b)
    assert (res.y >= 0).all()


def test_infeasible_system_has_positive_residual():
    A = np.array([[1.0, 1.0], [1.0, 1.0]])
    b = np.array([1.0, 2.0])
    res = phase1(A, b)
    assert res.residual > 0.5


def test_negative_rhs_rows():
    A = np.array([[1.0, -1.0]])
    res = phase1(A, np.array([-2.0]))
    assert np.allclose(A @ res.y, [-2.0])


def test_exact_mode_returns_fractions():
    A = [[3, 1], [1, 3]]
    res = phase1(A, [1, 1], exact=True)
    assert res.residual == 0
    assert list(res.y) == [Fraction(1, 4), Fraction(1, 4)]


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 100_000), m=st.integers(1, 5), nv=st.integers(1, 7))
def test_agrees_with_highs(seed, m, nv):
    rng = np.random.default_rng(seed)
    A = rng.integers(-2, 3, size=(m, nv)).astype(float)
    b = rng.integers(-2, 3, size=m).astype(float)
    ref = linprog(np.zeros(nv), A_eq=A, b_eq=b, bounds=(0, None), method="highs")
    res = phase1(A, b)
    if ref.status == 0:
        assert res.residual <= 1e-9
        assert np.allclose(A @ res.y, b, atol=1e-9)
    else:
        assert res.residual > 1e-9
    exact = phase1(A.astype(int), b.astype(int), exact=True)
    assert (exact.residual == 0) == (ref.status == 0)


def test_rational_rank_matches_numpy():
    rng = np.random.default_rng(5)
    for _ in range(30):
        rows = rng.integers(0, 2, size=(6, 5))
        rows[3] = rows[0] + rows[1]
        assert rational_rank(rows.tolist(), 5) == np.linalg.matrix_rank(rows)


def test_rational_rank_early_stop():
    rows = np.eye(4, dtype=int).tolist() * 3
    assert rational_rank(rows, 4, target=4) == 4
