from __future__ import annotations

import numpy as np
import pytest

from rsodc.core import (
    ProblemInstance,
    as_generator,
    center_columns,
    check_matrix,
    child_seed,
    thin_svd,
    top_eigenvalue_sym,
)


def test_as_generator_accepts_int_seedsequence_generator():
    g1 = as_generator(7)
    g2 = as_generator(np.random.SeedSequence(7))
    g3 = as_generator(np.random.default_rng(7))
    a, b, c = (g.standard_normal(4) for g in (g1, g2, g3))
    np.testing.assert_allclose(a, b)
    np.testing.assert_allclose(a, c)


def test_child_seed_streams_are_order_free_and_distinct():
    draws = {}
    for tags in [(1, 0), (1, 1), (2, 0)]:
        rng = as_generator(child_seed(9, *tags))
        draws[tags] = rng.standard_normal(3)
    again = as_generator(child_seed(9, 1, 1)).standard_normal(3)
    np.testing.assert_allclose(draws[(1, 1)], again)
    assert not np.allclose(draws[(1, 0)], draws[(1, 1)])
    assert not np.allclose(draws[(1, 0)], draws[(2, 0)])


def test_check_matrix_rejects_bad_shapes_and_nonfinite():
    with pytest.raises(ValueError):
        check_matrix(np.zeros(3))
    with pytest.raises(ValueError):
        check_matrix(np.zeros((0, 2)))
    with pytest.raises(ValueError):
        check_matrix(np.array([[1.0, np.nan]]))


def test_center_columns_zeroes_means_and_is_idempotent():
    rng = np.random.default_rng(0)
    X = rng.standard_normal((11, 4)) + 3.0
    Xc = center_columns(X)
    np.testing.assert_allclose(Xc.mean(axis=0), 0.0, atol=1e-12)
    np.testing.assert_allclose(center_columns(Xc), Xc, atol=1e-12)
    with pytest.raises(ValueError):
        center_columns(np.ones((1, 3)))


def test_thin_svd_reconstructs_and_orders():
    rng = np.random.default_rng(1)
    for _ in range(10):
        n = int(rng.integers(3, 12))
        d = int(rng.integers(1, n + 1))
        A = rng.standard_normal((n, d))
        L, sigma, R = thin_svd(A)
        assert L.shape == (n, d) and R.shape == (d, d)
        np.testing.assert_allclose(L.T @ L, np.eye(d), atol=1e-10)
        np.testing.assert_allclose(R.T @ R, np.eye(d), atol=1e-10)
        assert np.all(np.diff(sigma) <= 1e-12) and np.all(sigma >= 0)
        rel = np.linalg.norm(L @ np.diag(sigma) @ R.T - A) / max(1.0, np.linalg.norm(A))
        assert rel <= 1e-9
    with pytest.raises(ValueError):
        thin_svd(np.zeros((2, 3)))


def test_top_eigenvalue_matches_dense_solver_both_paths():
    rng = np.random.default_rng(2)
    for n in (5, 30, 80):
        G = rng.standard_normal((n, n))
        C = G @ G.T
        expect = float(np.linalg.eigvalsh(C)[-1])
        got = top_eigenvalue_sym(C)
        assert abs(got - expect) <= 1e-6 * max(1.0, abs(expect))
    with pytest.raises(ValueError):
        top_eigenvalue_sym(rng.standard_normal((4, 4)))


def test_problem_instance_validation():
    X = np.random.default_rng(3).standard_normal((10, 4))
    inst = ProblemInstance(data=X, k=3)
    assert (inst.n, inst.p, inst.d) == (10, 4, 2)
    with pytest.raises(ValueError):
        ProblemInstance(data=X, k=1)
    with pytest.raises(ValueError):
        ProblemInstance(data=X, k=6)  # k - 1 > min(n, p)
    with pytest.raises(ValueError):
        ProblemInstance(data=X, k=3, eta1=-0.1)
    with pytest.raises(ValueError):
        ProblemInstance(data=X, k=3, rho=0.0)
    with pytest.raises(ValueError):
        ProblemInstance(data=X, k=3, gamma=0.5, rho=0.1)
    with pytest.raises(ValueError):
        ProblemInstance(data=X, k=3, v_mode="fast")
    # the ratio filter only applies when the fusion term is active
    ProblemInstance(data=X, k=3, gamma=0.0, rho=0.01)
