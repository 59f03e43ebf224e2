from __future__ import annotations

import warnings

import numpy as np
import pytest

from rsodc.core import ProblemInstance, center_columns
from rsodc.datagen import SimulationConfig, generate
from rsodc.fusion_graph import build_fusion_graph
from rsodc.solver import (
    convex_clustering,
    fit_rsodc,
    fit_sodc,
    kmeans,
    objective,
    tandem_baseline,
)


def _blobs(rng, k: int = 3, per: int = 10, spread: float = 0.15) -> tuple:
    centers = np.array([[0.0, 0.0], [6.0, 0.0], [0.0, 6.0], [6.0, 6.0]])[:k]
    X = np.vstack([c + spread * rng.standard_normal((per, 2)) for c in centers])
    truth = np.repeat(np.arange(1, k + 1), per)
    return X, truth


def test_objective_hand_value():
    X = np.array([[1.0, 0.0], [0.0, 1.0], [-1.0, -1.0]])
    inst = ProblemInstance(data=X, k=2, eta1=0.5, eta2=0.25, gamma=0.01, rho=0.1)
    B = np.array([[1.0], [-2.0]])
    Y = np.array([[0.5], [0.5], [-1.0]])
    graph = build_fusion_graph(X, tau=0.0, delta=2, rho=0.1)
    Xc = center_columns(X)
    fit = 0.5 * np.sum((Y - Xc @ B) ** 2)
    ridge = 0.25 * np.sum(B * B)
    sparsity = 0.5 * (1.0 + 2.0)
    fusion = 0.01 * sum(
        np.linalg.norm(Y[i] - Y[j]) for i, j in graph.edges)
    expect = fit + ridge + sparsity + fusion
    assert objective(inst, B, Y, graph) == pytest.approx(expect, rel=1e-12)


def test_fit_sodc_recovers_separated_blobs():
    rng = np.random.default_rng(0)
    X, truth = _blobs(rng, k=3, per=12)
    inst = ProblemInstance(data=X, k=3, eta1=0.1)
    fit = fit_sodc(inst, seed=1)
    assert fit.method == "sodc"
    assert fit.labels.min() == 1 and fit.labels.max() == 3
    # perfect recovery up to label permutation
    from rsodc.metrics import adjusted_rand_index
    assert adjusted_rand_index(truth, fit.labels) == pytest.approx(1.0)
    tr = fit.objective_trace
    assert np.all(np.diff(tr) <= 1e-8)
    assert fit.status in ("converged", "stalled")


def test_fit_rsodc_trace_is_monotone_and_constraints_hold():
    cfg = SimulationConfig(n=40, p=20, k=3, theta=2.2, xi=0.5, seed=11)
    X, _ = generate(cfg)
    inst = ProblemInstance(data=X, k=3, eta1=2.5, gamma=0.001, rho=0.01)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        fit = fit_rsodc(inst, seed=2)
    assert np.all(np.diff(fit.objective_trace) <= 1e-8)
    assert fit.diagnostics["max_orth_violation"] <= 1e-8
    assert fit.diagnostics["max_center_violation"] <= 1e-8
    assert fit.outer_iters == len(fit.objective_trace) - 1
    assert len(fit.inner_iterations) == fit.outer_iters
    d = inst.d
    np.testing.assert_allclose(fit.Y_hat.T @ fit.Y_hat, np.eye(d), atol=1e-8)
    np.testing.assert_allclose(fit.embedding, center_columns(X) @ fit.B_hat,
                               atol=1e-12)


def test_fit_rsodc_gamma_zero_matches_fit_sodc_exactly():
    cfg = SimulationConfig(n=30, p=20, k=3, theta=2.5, xi=0.3, seed=5)
    X, _ = generate(cfg)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        a = fit_sodc(ProblemInstance(data=X, k=3, eta1=1.0), seed=4)
        b = fit_rsodc(ProblemInstance(data=X, k=3, eta1=1.0, gamma=0.0), seed=4)
    assert abs(a.objective_trace[-1] - b.objective_trace[-1]) <= 1e-6
    np.testing.assert_allclose(a.B_hat, b.B_hat, atol=1e-8)
    np.testing.assert_array_equal(a.labels, b.labels)


def test_v_mode_exact_also_descends():
    cfg = SimulationConfig(n=30, p=20, k=3, theta=2.2, xi=0.5, seed=9)
    X, _ = generate(cfg)
    inst = ProblemInstance(data=X, k=3, eta1=2.0, gamma=0.003, rho=0.05,
                           v_mode="exact")
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        fit = fit_rsodc(inst, seed=3)
    assert np.all(np.diff(fit.objective_trace) <= 1e-8)


def test_kmeans_exact_on_separated_blobs():
    rng = np.random.default_rng(1)
    X, truth = _blobs(rng, k=4, per=8)
    labels, centroids = kmeans(X, 4, restarts=10, seed=0)
    assert labels.shape == (32,)
    assert set(labels.tolist()) == {1, 2, 3, 4}
    from rsodc.metrics import adjusted_rand_index
    assert adjusted_rand_index(truth, labels) == pytest.approx(1.0)
    # centroids are the cluster means and the inertia matches by hand
    inertia = 0.0
    for c in range(1, 5):
        pts = X[labels == c]
        mean = pts.mean(axis=0)
        row = np.argmin(np.linalg.norm(centroids.M - mean, axis=1))
        np.testing.assert_allclose(centroids.M[row], mean, atol=1e-9)
        inertia += float(np.sum((pts - mean) ** 2))
    assert centroids.inertia == pytest.approx(inertia, rel=1e-10)


def test_kmeans_handles_k_equal_n_and_duplicates():
    X = np.array([[0.0, 0.0], [0.0, 0.0], [1.0, 1.0], [5.0, 5.0]])
    labels, centroids = kmeans(X, 4, restarts=5, seed=0)
    assert sorted(set(labels.tolist())) == [1, 2, 3, 4]
    assert centroids.inertia == pytest.approx(0.0, abs=1e-20)
    with pytest.raises(ValueError):
        kmeans(X, 5)


def test_kmeans_is_deterministic_per_seed():
    rng = np.random.default_rng(2)
    X = rng.standard_normal((50, 3))
    la, ca = kmeans(X, 4, restarts=6, seed=42)
    lb, cb = kmeans(X, 4, restarts=6, seed=42)
    np.testing.assert_array_equal(la, lb)
    np.testing.assert_allclose(ca.M, cb.M)


def test_convex_clustering_zero_gamma_returns_data():
    rng = np.random.default_rng(3)
    X = rng.standard_normal((9, 2))
    graph = build_fusion_graph(X, tau=0.1, delta=3, rho=0.5)
    centers, labels = convex_clustering(X, graph, gamma=0.0, rho=0.5)
    np.testing.assert_allclose(centers.M, X, atol=1e-6)
    assert len(set(labels.tolist())) == 9
    assert centers.inertia == pytest.approx(0.0, abs=1e-10)


def test_convex_clustering_fuses_blobs_then_everything():
    rng = np.random.default_rng(4)
    X, truth = _blobs(rng, k=2, per=6, spread=0.05)
    graph = build_fusion_graph(X, tau=0.0, delta=11, rho=1.0)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        _, labels_mid = convex_clustering(X, graph, gamma=0.05, rho=1.0,
                                          max_iter=4000)
        _, labels_big = convex_clustering(X, graph, gamma=50.0, rho=1.0,
                                          max_iter=4000)
    from rsodc.metrics import adjusted_rand_index
    assert adjusted_rand_index(truth, labels_mid) == pytest.approx(1.0)
    assert len(set(labels_big.tolist())) == 1
    # labels are numbered by first occurrence
    assert labels_mid[0] == 1


def test_tandem_baseline_shapes_and_recovery():
    rng = np.random.default_rng(5)
    X, truth = _blobs(rng, k=3, per=10)
    fit = tandem_baseline(X, 3, seed=0)
    assert fit.method == "tandem"
    assert fit.B_hat.shape == (2, 2)
    assert fit.embedding.shape == (30, 2)
    from rsodc.metrics import adjusted_rand_index
    assert adjusted_rand_index(truth, fit.labels) == pytest.approx(1.0)
    with pytest.raises(ValueError):
        tandem_baseline(X, 4)  # k - 1 exceeds the data dimension
