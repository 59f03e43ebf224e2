"""Fusion graph: k-nearest-neighbor edges, Gaussian kernel weights, and the
quadratic matrix C with its majorization constant omega.

Edges l = (i, j) with i < j carry weights
alpha_{i,j} = indicator(kNN union) * exp(-tau * ||x_i - x_j||^2); pairs with
alpha = 0 are excluded. C = (rho/2) * sum_l g_l g_l^T aggregates the plain
incidence outer products WITHOUT the alpha weights: the weights enter the
algorithm only through the per-edge shrinkage thresholds in the V step.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import check_matrix, top_eigenvalue_sym

# Floor for omega when the edge set is empty (C = 0): keeps the
# majorization step defined as a vanishingly small shift toward Q.
OMEGA_FLOOR = 1e-12

DEFAULT_TAU = 0.1
DEFAULT_DELTA = 25


@dataclass
class FusionGraph:
    """Edge set with weights plus the assembled quadratic C and omega."""

    edges: np.ndarray          # (m, 2) int array, each row (i, j) with i < j
    alpha: np.ndarray          # (m,) positive weights
    n: int
    tau: float
    delta: int
    rho: float | None = None
    C: np.ndarray | None = None
    omega: float | None = None

    @property
    def m(self) -> int:
        return int(self.edges.shape[0])


def knn_indicator(X, delta: int) -> np.ndarray:
    """Symmetric boolean matrix: True iff j is among i's delta nearest
    neighbors or i is among j's (union symmetrization).

    Distances are Euclidean over rows. Ties are broken by smaller index.
    Requires 1 <= delta <= n - 1.
    """
    X = check_matrix(X)
    n = X.shape[0]
    if not 1 <= delta <= n - 1:
        raise ValueError(f"delta must be in [1, n-1] = [1, {n - 1}], got {delta}")
    sq = np.sum(X * X, axis=1)
    d2 = sq[:, None] + sq[None, :] - 2.0 * (X @ X.T)
    np.fill_diagonal(d2, np.inf)
    # stable argsort breaks distance ties by smaller column index
    order = np.argsort(d2, axis=1, kind="stable")
    ind = np.zeros((n, n), dtype=bool)
    rows = np.repeat(np.arange(n), delta)
    ind[rows, order[:, :delta].ravel()] = True
    return ind | ind.T


def compute_weights(X, tau: float = DEFAULT_TAU, delta: int = DEFAULT_DELTA) -> FusionGraph:
    """Build the weighted edge set from the data.

    Returns a FusionGraph whose edges are sorted by (i, j) and carry
    alpha_{i,j} = exp(-tau * ||x_i - x_j||_2^2) on indicated pairs; pairs
    whose weight underflows to zero are dropped.
    """
    X = check_matrix(X)
    if tau < 0:
        raise ValueError(f"tau must be >= 0, got {tau}")
    n = X.shape[0]
    ind = knn_indicator(X, delta)
    iu, ju = np.where(np.triu(ind, k=1))
    diff = X[iu] - X[ju]
    alpha = np.exp(-tau * np.sum(diff * diff, axis=1))
    keep = alpha > 0.0
    edges = np.stack([iu[keep], ju[keep]], axis=1).astype(np.int64)
    return FusionGraph(edges=edges, alpha=alpha[keep], n=n, tau=float(tau), delta=int(delta))


def incidence_vector(l: tuple[int, int], n: int) -> np.ndarray:
    """The vector g_l with +1 at i, -1 at j, zeros elsewhere (0-based, i < j < n)."""
    i, j = int(l[0]), int(l[1])
    if i == j:
        raise ValueError(f"edge endpoints must differ, got ({i}, {j})")
    if not (0 <= i < j < n):
        raise ValueError(f"edge ({i}, {j}) out of range for n = {n}")
    g = np.zeros(n)
    g[i] = 1.0
    g[j] = -1.0
    return g


def build_quadratic(graph: FusionGraph, rho: float) -> FusionGraph:
    """Fill in C = (rho/2) * sum_l g_l g_l^T and its majorization constant.

    omega is the top eigenvalue of C inflated by (1 + 1e-8) so that
    omega*I - C stays PSD under floating point; an empty edge set yields
    C = 0 with omega floored at 1e-12.
    """
    if rho <= 0:
        raise ValueError(f"rho must be > 0, got {rho}")
    n = graph.n
    C = np.zeros((n, n))
    if graph.m > 0:
        i, j = graph.edges[:, 0], graph.edges[:, 1]
        np.add.at(C, (i, i), 1.0)
        np.add.at(C, (j, j), 1.0)
        np.add.at(C, (i, j), -1.0)
        np.add.at(C, (j, i), -1.0)
        C *= rho / 2.0
        omega = top_eigenvalue_sym(C) * (1.0 + 1e-8)
    else:
        omega = OMEGA_FLOOR
    graph.rho = float(rho)
    graph.C = C
    graph.omega = float(max(omega, OMEGA_FLOOR))
    return graph


def build_fusion_graph(X, tau: float = DEFAULT_TAU, delta: int = DEFAULT_DELTA,
                       rho: float = 0.01) -> FusionGraph:
    """Convenience: weights then quadratic in one call."""
    return build_quadratic(compute_weights(X, tau, delta), rho)


def restrict(graph: FusionGraph, keep: np.ndarray, rho: float) -> FusionGraph:
    """Sub-graph on a boolean edge mask, with C and omega rebuilt."""
    sub = FusionGraph(edges=graph.edges[keep], alpha=graph.alpha[keep],
                      n=graph.n, tau=graph.tau, delta=graph.delta)
    return build_quadratic(sub, rho)
