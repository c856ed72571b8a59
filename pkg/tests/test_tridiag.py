import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from anisoflow.errors import SolveFailure
from anisoflow.tridiag import cyclic_matvec, dominance_margin, residual, solve_cyclic, to_dense


def random_system(rng, n, k=None):
    lower = rng.uniform(-1, 1, n)
    upper = rng.uniform(-1, 1, n)
    diag = (np.abs(lower) + np.abs(upper) + rng.uniform(0.1, 2.0, n)) * rng.choice([-1, 1], n)
    rhs = rng.normal(size=n if k is None else (n, k))
    return lower, diag, upper, rhs


def test_dense_layout():
    M = to_dense(np.array([1.0, 2, 3, 4]), np.array([10.0, 20, 30, 40]), np.array([5.0, 6, 7, 8]))
    assert M[0, 3] == 1 and M[0, 1] == 5 and M[3, 0] == 8 and M[3, 2] == 4


def test_matvec_matches_dense():
    rng = np.random.default_rng(0)
    lo, d, up, b = random_system(rng, 9)
    assert np.allclose(cyclic_matvec(lo, d, up, b), to_dense(lo, d, up) @ b)


@settings(max_examples=60, deadline=None)
@given(st.integers(4, 64), st.integers(0, 2**32 - 1))
def test_against_dense_solver(n, seed):
    rng = np.random.default_rng(seed)
    lo, d, up, b = random_system(rng, n)
    x = solve_cyclic(lo, d, up, b)
    ref = np.linalg.solve(to_dense(lo, d, up), b)
    assert np.abs(x - ref).max() < 1e-12


def test_multiple_right_hand_sides():
    rng = np.random.default_rng(1)
    lo, d, up, B = random_system(rng, 20, k=2)
    X = solve_cyclic(lo, d, up, B)
    assert X.shape == (20, 2)
    assert residual(lo, d, up, X, B) < 1e-14


def test_rejects_non_dominant_and_small():
    lo = np.ones(5)
    with pytest.raises(SolveFailure):
        solve_cyclic(lo, np.ones(5), lo, np.ones(5))
    with pytest.raises(ValueError):
        solve_cyclic(np.ones(2), 3 * np.ones(2), np.ones(2), np.ones(2))
    assert dominance_margin(lo, 3 * lo, lo) == pytest.approx(1.0)
