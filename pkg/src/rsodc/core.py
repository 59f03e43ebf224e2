"""Shared numeric primitives: centering, decompositions, RNG plumbing.

Every other module builds on the three contracts here: column centering
(applied implicitly, the n x n centering matrix is never materialized),
thin SVD, and the top eigenvalue of a symmetric PSD matrix.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# Singular values below RANK_TOL * sigma_max count as zero for rank decisions.
RANK_TOL = 1e-12

# Entries of an estimated coefficient row below this are treated as exact zeros.
ZERO_TOL = 1e-12


def as_generator(seed) -> np.random.Generator:
    """Return a numpy Generator from an int seed, a SeedSequence, or a Generator."""
    if isinstance(seed, np.random.Generator):
        return seed
    if isinstance(seed, np.random.SeedSequence):
        return np.random.default_rng(seed)
    return np.random.default_rng(int(seed))


def child_seed(seed: int, *tags: int) -> np.random.SeedSequence:
    """Derive an independent RNG stream for one work item.

    The stream depends only on (seed, tags), never on scheduling order, so
    parallel and serial runs of the same campaign produce identical numbers.
    """
    return np.random.SeedSequence([int(seed)] + [int(t) for t in tags])


def check_matrix(X, name: str = "X") -> np.ndarray:
    """Validate and return a finite 2-d float array."""
    A = np.asarray(X, dtype=float)
    if A.ndim != 2:
        raise ValueError(f"{name} must be 2-dimensional, got shape {A.shape}")
    if A.shape[0] < 1 or A.shape[1] < 1:
        raise ValueError(f"{name} must be non-empty, got shape {A.shape}")
    if not np.isfinite(A).all():
        raise ValueError(f"{name} contains non-finite entries")
    return A


def center_columns(X) -> np.ndarray:
    """Subtract the column means of X (rows are subjects).

    Equivalent to left-multiplying by the centering matrix, computed in
    O(np) without forming the n x n projector. Requires n >= 2.
    """
    A = check_matrix(X)
    if A.shape[0] < 2:
        raise ValueError(f"need at least 2 rows to center, got {A.shape[0]}")
    return A - A.mean(axis=0, keepdims=True)


def thin_svd(A) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Thin SVD of an n x d matrix with d <= n.

    Returns (L, sigma, R) with L n x d column-orthonormal, sigma non-negative
    and non-increasing, R d x d orthogonal, and A = L @ diag(sigma) @ R.T.
    """
    A = check_matrix(A, "A")
    n, d = A.shape
    if d > n:
        raise ValueError(f"thin_svd expects d <= n, got shape {A.shape}")
    L, sigma, Rt = np.linalg.svd(A, full_matrices=False)
    return L, sigma, Rt.T


def top_eigenvalue_sym(C) -> float:
    """Largest eigenvalue of a symmetric PSD matrix.

    Exact symmetric eigensolve for n <= 64; power iteration (tol 1e-10,
    cap 5000) above that. Asymmetry beyond 1e-8 is a contract violation.
    """
    C = check_matrix(C, "C")
    n, m = C.shape
    if n != m:
        raise ValueError(f"C must be square, got shape {C.shape}")
    if np.max(np.abs(C - C.T)) > 1e-8:
        raise ValueError("C must be symmetric")
    if n <= 64:
        return float(np.linalg.eigvalsh(C)[-1])
    # power iteration with a deterministic start
    v = np.ones(n) / np.sqrt(n)
    lam = 0.0
    for _ in range(5000):
        w = C @ v
        norm = np.linalg.norm(w)
        if norm <= 1e-300:
            return 0.0
        v_new = w / norm
        lam_new = float(v_new @ (C @ v_new))
        if abs(lam_new - lam) <= 1e-10 * max(1.0, abs(lam_new)):
            return lam_new
        v, lam = v_new, lam_new
    return lam


@dataclass
class ProblemInstance:
    """One clustering problem: the data plus every tuning parameter.

    gamma / rho < 1 is required when both are nonzero; it keeps the
    per-edge shrinkage factors psi_l = gamma * alpha_l / rho below 1.
    """

    data: np.ndarray
    k: int
    eta1: float = 0.0
    eta2: float = 0.0
    gamma: float = 0.0
    rho: float = 0.01
    nu: float = 0.001
    epsilon: float = 1e-6
    max_outer: int = 100
    max_inner: int = 1000
    v_mode: str = "paper"

    def __post_init__(self):
        self.data = check_matrix(self.data, "data")
        n, p = self.data.shape
        if self.k < 2:
            raise ValueError(f"k must be >= 2, got {self.k}")
        if self.k - 1 > min(n, p):
            raise ValueError(
                f"k - 1 = {self.k - 1} exceeds min(n, p) = {min(n, p)}; "
                "the embedding dimension is not representable"
            )
        for name in ("eta1", "eta2", "gamma"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")
        if self.rho <= 0:
            raise ValueError("rho must be > 0")
        if self.nu <= 0:
            raise ValueError("nu must be > 0")
        if self.epsilon <= 0:
            raise ValueError("epsilon must be > 0")
        if self.gamma > 0 and self.gamma / self.rho >= 1:
            raise ValueError(
                f"gamma/rho = {self.gamma / self.rho:.3g} must be < 1 "
                "(stability filter for the V update)"
            )
        if self.v_mode not in ("paper", "exact"):
            raise ValueError(f"v_mode must be 'paper' or 'exact', got {self.v_mode!r}")

    @property
    def n(self) -> int:
        return self.data.shape[0]

    @property
    def p(self) -> int:
        return self.data.shape[1]

    @property
    def d(self) -> int:
        return self.k - 1
