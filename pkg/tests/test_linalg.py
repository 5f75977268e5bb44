import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fusedalm.linalg import SingularSystemError, TridiagonalSystem, solve_tridiagonal


def dense_gauss(A, b):
    """Naive Gaussian elimination with partial pivoting on a dense matrix."""
    A = np.array(A, dtype=float)
    b = np.array(b, dtype=float)
    n = len(b)
    for k in range(n):
        p = k + int(np.argmax(np.abs(A[k:, k])))
        A[[k, p]], b[[k, p]] = A[[p, k]], b[[p, k]]
        for i in range(k + 1, n):
            m = A[i, k] / A[k, k]
            A[i, k:] -= m * A[k, k:]
            b[i] -= m * b[k]
    x = np.zeros(n)
    for i in range(n - 1, -1, -1):
        x[i] = (b[i] - A[i, i + 1:] @ x[i + 1:]) / A[i, i]
    return x


def dense(sys):
    n = sys.n
    A = np.diag(sys.main)
    if n > 1:
        A += np.diag(sys.sub, -1) + np.diag(sys.sup, 1)
    return A


def random_dominant(rng, n):
    sub = rng.uniform(-1, 1, n - 1)
    sup = rng.uniform(-1, 1, n - 1)
    off = np.zeros(n)
    off[1:] += np.abs(sub)
    off[:-1] += np.abs(sup)
    main = (off + rng.uniform(0.1, 2.0, n)) * rng.choice([-1, 1], n)
    return TridiagonalSystem(sub, main, sup, rng.normal(scale=10, size=n))


def test_identity():
    s = TridiagonalSystem(np.zeros(2), np.ones(3), np.zeros(2), np.array([3.0, -2.0, 7.0]))
    np.testing.assert_array_equal(solve_tridiagonal(s), [3, -2, 7])


def test_constant_solution():
    s = TridiagonalSystem(np.array([1.0]), np.array([2.0, 2.0]), np.array([1.0]), np.array([3.0, 3.0]))
    np.testing.assert_allclose(solve_tridiagonal(s), [1, 1], atol=1e-15)


def test_three_by_three_matches_exact_elimination():
    # exact rational elimination gives (3/7, 2/7, 3/7)
    s = TridiagonalSystem(-np.ones(2), 3 * np.ones(3), -np.ones(2), np.array([1.0, 0.0, 1.0]))
    np.testing.assert_allclose(solve_tridiagonal(s), [3 / 7, 2 / 7, 3 / 7], atol=1e-12)
    np.testing.assert_allclose(solve_tridiagonal(s), dense_gauss(dense(s), s.rhs), atol=1e-12)


def test_scalar_system():
    s = TridiagonalSystem(np.empty(0), np.array([4.0]), np.empty(0), np.array([2.0]))
    assert solve_tridiagonal(s)[0] == 0.5


def test_random_dominant_systems(rng):
    for _ in range(1000):
        s = random_dominant(rng, int(rng.integers(1, 65)))
        x = solve_tridiagonal(s)
        assert np.max(np.abs(s.matvec(x) - s.rhs)) <= 1e-10 * (1 + np.max(np.abs(s.rhs)))
        ref = dense_gauss(dense(s), s.rhs)
        assert np.max(np.abs(x - ref)) <= 1e-10 * (1 + np.max(np.abs(ref)))


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 64), st.integers(0, 2**32 - 1), st.floats(-1e3, 1e3).filter(lambda s: abs(s) > 1e-3))
def test_linear_in_rhs(n, seed, scale):
    s = random_dominant(np.random.default_rng(seed), n)
    x = solve_tridiagonal(s)
    xs = solve_tridiagonal(TridiagonalSystem(s.sub, s.main, s.sup, scale * s.rhs))
    np.testing.assert_allclose(xs, scale * x, rtol=1e-12, atol=1e-300)


def test_scratch_and_out_buffers_reused(rng):
    s = random_dominant(rng, 10)
    scratch, out = np.empty(10), np.empty(10)
    x = solve_tridiagonal(s, scratch, out)
    assert x is out
    np.testing.assert_allclose(x, solve_tridiagonal(s))


def test_zero_pivot_reported():
    s = TridiagonalSystem(np.array([1.0]), np.array([1.0, 1.0]), np.array([1.0]), np.ones(2))
    with pytest.raises(SingularSystemError):
        solve_tridiagonal(s)


@pytest.mark.parametrize("bad", [
    dict(sub=np.zeros(1), main=np.ones(3), sup=np.zeros(2), rhs=np.ones(3)),
    dict(sub=np.zeros(2), main=np.ones(3), sup=np.zeros(2), rhs=np.array([1.0, np.nan, 1.0])),
    dict(sub=np.zeros(0), main=np.zeros(0), sup=np.zeros(0), rhs=np.zeros(0)),
])
def test_invalid_systems_rejected(bad):
    with pytest.raises(ValueError):
        TridiagonalSystem(**bad)
