"""Synthetic Gaussian clusters with a block covariance: q informative
variables sharing correlation xi, c* correlated noise variables at 0.6, and
independent noise on the rest. Cluster means place the signal on the first
q coordinates only."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import as_generator

# default correlated-noise block size for each supported feature count
C_STAR_BY_P = {20: 12, 50: 24, 80: 36, 100: 48}

XI_DAGGER_DEFAULT = 0.6


@dataclass
class SimulationConfig:
    """Factors of one synthetic cell."""

    n: int
    p: int
    k: int
    theta: float
    xi: float
    q: int = 2
    c_star: int = None
    xi_dagger: float = XI_DAGGER_DEFAULT
    seed: object = 0

    def __post_init__(self):
        if self.c_star is None:
            if self.p not in C_STAR_BY_P:
                raise ValueError(
                    f"no default correlated-noise count for p = {self.p}; "
                    "pass c_star explicitly")
            self.c_star = C_STAR_BY_P[self.p]
        if self.k not in (2, 3, 4):
            raise ValueError("k must be 2, 3, or 4")
        if self.q < 2 or self.q % 2 != 0:
            raise ValueError("q must be even and >= 2")
        if self.q + self.c_star > self.p:
            raise ValueError("q + c_star must not exceed p")
        if self.n < self.k:
            raise ValueError("need at least one subject per cluster")
        for name, val in (("xi", self.xi), ("xi_dagger", self.xi_dagger)):
            if not 0.0 <= val <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1]")


def _equicorrelated(size: int, xi: float) -> np.ndarray:
    return (1.0 - xi) * np.eye(size) + xi * np.ones((size, size))


def build_covariance(config: SimulationConfig) -> np.ndarray:
    """Block-diagonal covariance: informative, correlated-noise, identity."""
    S = np.eye(config.p)
    S[:config.q, :config.q] = _equicorrelated(config.q, config.xi)
    stop = config.q + config.c_star
    S[config.q:stop, config.q:stop] = _equicorrelated(config.c_star,
                                                      config.xi_dagger)
    return S


def cluster_means(config: SimulationConfig) -> np.ndarray:
    """k x p mean matrix; only the first q coordinates are nonzero."""
    h = config.q // 2
    ones = np.ones(config.q)
    split = np.concatenate([-np.ones(h), np.ones(h)])
    m = [split, ones, -split, -ones]
    means = np.zeros((config.k, config.p))
    for row in range(config.k):
        means[row, :config.q] = config.theta * m[row]
    return means


def _factor(S: np.ndarray) -> np.ndarray:
    try:
        return np.linalg.cholesky(S)
    except np.linalg.LinAlgError:
        # boundary correlations make S singular; factor via eigenpairs
        vals, vecs = np.linalg.eigh(S)
        return vecs * np.sqrt(np.maximum(vals, 0.0))


def generate(config: SimulationConfig):
    """Draw one dataset.

    Cluster sizes are n // k with the remainder given to the first
    clusters. Returns (X, labels) with labels in 1..k, deterministic in
    config.seed.
    """
    rng = as_generator(config.seed)
    base, rem = divmod(config.n, config.k)
    sizes = [base + 1] * rem + [base] * (config.k - rem)
    labels = np.repeat(np.arange(1, config.k + 1), sizes)
    means = cluster_means(config)
    factor = _factor(build_covariance(config))
    Z = rng.standard_normal((config.n, config.p))
    X = means[labels - 1] + Z @ factor.T
    return X, labels
