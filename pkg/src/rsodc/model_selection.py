"""Tuning-parameter selection by kappa-based clustering stability and
cluster-number selection by the gap statistic.

Stability scoring fits the solver on two random halves of the data with the
same weights and compares which variables each half selects; weights whose
selected support replicates across splits score high. The gap statistic
compares the k-means dispersion of an embedding against uniform reference
draws from its bounding box.
"""

from __future__ import annotations

import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .core import ProblemInstance, ZERO_TOL, check_matrix, child_seed, thin_svd
from .fusion_graph import DEFAULT_DELTA, DEFAULT_TAU, build_fusion_graph
from .solver import fit_rsodc, kmeans

PAPER_ETA1 = (0.1, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0)
PAPER_GAMMA = (0.001, 0.003, 0.005, 0.007, 0.01)
PAPER_RHO = (0.01, 0.03, 0.05, 0.07, 0.1)

DISPERSION_FLOOR = 1e-12


@dataclass
class ParamGrid:
    """Candidate weights; combos keeps only gamma / rho < 1."""

    eta1_candidates: tuple = PAPER_ETA1
    gamma_candidates: tuple = PAPER_GAMMA
    rho_candidates: tuple = PAPER_RHO
    repeats: int = 10

    def __post_init__(self):
        if self.repeats < 1:
            raise ValueError("repeats must be >= 1")

    @property
    def combos(self) -> list:
        out = [(e1, g, r)
               for e1 in self.eta1_candidates
               for g in self.gamma_candidates
               for r in self.rho_candidates
               if g / r < 1.0]
        if not out:
            raise ValueError("no candidate combination satisfies gamma / rho < 1")
        return out


@dataclass
class GapCurve:
    """gap and standard-error values per candidate cluster count."""

    k_candidates: list
    gap: np.ndarray
    se: np.ndarray
    chosen_k: int


def selection_indicator(B) -> np.ndarray:
    """Binary vector marking rows of B with any entry above 1e-12."""
    B = check_matrix(B, "B")
    return (np.abs(B) > ZERO_TOL).any(axis=1).astype(int)


def kappa(a, b) -> float:
    """Cohen's kappa between two binary selection vectors.

    Both-all-zero and both-all-one pairs return -1 (degenerate selections
    are treated as maximally unstable). The remaining chance-agreement
    corner p_e = 1 cannot occur outside those cases; it would return 0.
    """
    a = np.asarray(a).ravel()
    b = np.asarray(b).ravel()
    if a.size != b.size or a.size == 0:
        raise ValueError("vectors must share a positive length")
    for v in (a, b):
        if not np.isin(v, (0, 1)).all():
            raise ValueError("vectors must be binary")
    if (a.sum() == 0 and b.sum() == 0) or (a.sum() == a.size and b.sum() == b.size):
        return -1.0
    p_o = float(np.mean(a == b))
    pa, pb = float(np.mean(a)), float(np.mean(b))
    p_e = pa * pb + (1.0 - pa) * (1.0 - pb)
    if p_e == 1.0:
        return 0.0
    return (p_o - p_e) / (1.0 - p_e)


def _run_items(items, fn, threads: int) -> list:
    if threads <= 1:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def stability_cv(X, k: int, grid: ParamGrid = None, tau: float = DEFAULT_TAU,
                 delta: int = DEFAULT_DELTA, seed: int = 0, eta2: float = 0.0,
                 nu: float = 0.001, epsilon: float = 1e-6, max_outer: int = 100,
                 max_inner: int = 1000, v_mode: str = "paper", threads: int = 1):
    """Pick the weight combination whose variable selection is most stable.

    For every combo and each of grid.repeats random half splits (sizes
    floor(n/2) and the rest; splits shared across combos), the solver runs
    on both halves and the kappa of the two selection indicators is
    recorded. A failed fit contributes kappa -1 with a warning. The best
    combo maximizes mean kappa; ties go to the smallest (eta1, gamma, rho).

    Returns
    -------
    (best, table)
        best: dict with eta1, gamma, rho, mean_kappa. table: one dict per
        combo with the per-repeat kappas and failure count.
    """
    X = check_matrix(X, "X")
    n = X.shape[0]
    if n < 4:
        raise ValueError("need n >= 4 for two nonempty halves")
    grid = grid if grid is not None else ParamGrid()
    combos = grid.combos
    half = n // 2
    splits = []
    for r in range(grid.repeats):
        perm = np.random.default_rng(child_seed(seed, 2, r)).permutation(n)
        splits.append((np.sort(perm[:half]), np.sort(perm[half:])))

    failures = np.zeros(len(combos), dtype=int)

    def run(item):
        ci, r = item
        eta1, gamma, rho = combos[ci]
        inds = []
        for side, rows in enumerate(splits[r]):
            sub = X[rows]
            inst = ProblemInstance(data=sub, k=k, eta1=eta1, eta2=eta2,
                                   gamma=gamma, rho=rho, nu=nu, epsilon=epsilon,
                                   max_outer=max_outer, max_inner=max_inner,
                                   v_mode=v_mode)
            graph = build_fusion_graph(sub, tau, min(delta, sub.shape[0] - 1), rho)
            fit = fit_rsodc(inst, graph, seed=child_seed(seed, 3, ci, r, side))
            inds.append(selection_indicator(fit.B_hat))
        return kappa(inds[0], inds[1])

    def safe(item):
        try:
            return run(item)
        except Exception as exc:
            ci, r = item
            failures[ci] += 1
            warnings.warn(f"cv fit failed for combo {combos[ci]} split {r}: {exc}",
                          RuntimeWarning)
            return -1.0

    items = [(ci, r) for ci in range(len(combos)) for r in range(grid.repeats)]
    values = np.asarray(_run_items(items, safe, threads))
    kappas = values.reshape(len(combos), grid.repeats)
    means = kappas.mean(axis=1)

    table = []
    for ci, (eta1, gamma, rho) in enumerate(combos):
        table.append({"eta1": eta1, "gamma": gamma, "rho": rho,
                      "mean_kappa": float(means[ci]),
                      "kappas": kappas[ci].tolist(),
                      "failures": int(failures[ci])})
    order = sorted(range(len(combos)),
                   key=lambda ci: (-means[ci],) + combos[ci])
    bi = order[0]
    best = {"eta1": combos[bi][0], "gamma": combos[bi][1], "rho": combos[bi][2],
            "mean_kappa": float(means[bi])}
    return best, table


def _log_dispersion(points, k: int, restarts: int, seed) -> float:
    _, centroids = kmeans(points, k, restarts=restarts, seed=seed)
    return float(np.log(max(centroids.inertia, DISPERSION_FLOOR)))


def choose_k_from_curve(k_candidates, gap, se) -> int:
    """Smallest k with gap(k) >= gap(next) - se(next); argmax gap fallback."""
    gap = np.asarray(gap, dtype=float)
    se = np.asarray(se, dtype=float)
    ks = list(k_candidates)
    for i in range(len(ks) - 1):
        if gap[i] >= gap[i + 1] - se[i + 1]:
            return ks[i]
    return ks[int(np.argmax(gap))]


def gap_statistic(points, k_range, mc_samples: int = 100, seed: int = 0,
                  restarts: int = 10, reference: str = "uniform") -> GapCurve:
    """Gap curve of a point set over candidate cluster counts.

    gap(k) averages log(W*_k) - log(W_k) over mc_samples uniform reference
    draws from the bounding box of `points` (reference="pca" aligns the box
    with the principal axes first); W is the k-means within-cluster sum of
    squares, floored at 1e-12 before the log. se(k) is the reference
    standard deviation scaled by sqrt(1 + 1/mc_samples).
    """
    P = check_matrix(points, "points")
    n, p = P.shape
    ks = sorted(set(int(k) for k in k_range))
    if not ks:
        raise ValueError("empty k_range")
    if ks[0] < 1 or ks[-1] > n - 1:
        raise ValueError(f"k candidates must lie in [1, {n - 1}]")
    if reference not in ("uniform", "pca"):
        raise ValueError("reference must be 'uniform' or 'pca'")
    if reference == "pca":
        mu = P.mean(axis=0)
        _, _, R = thin_svd(P - mu)
        frame = (P - mu) @ R
    else:
        mu, R = None, None
        frame = P
    lo, hi = frame.min(axis=0), frame.max(axis=0)

    log_w = np.array([_log_dispersion(P, k, restarts, child_seed(seed, 7, k))
                      for k in ks])
    log_w_ref = np.empty((mc_samples, len(ks)))
    for b in range(mc_samples):
        rng_b = np.random.default_rng(child_seed(seed, 8, b))
        draw = lo + rng_b.random((n, p)) * (hi - lo)
        if reference == "pca":
            draw = draw @ R.T + mu
        for idx, k in enumerate(ks):
            log_w_ref[b, idx] = _log_dispersion(draw, k, restarts,
                                                child_seed(seed, 9, b, k))
    gap = log_w_ref.mean(axis=0) - log_w
    se = log_w_ref.std(axis=0, ddof=0) * np.sqrt(1.0 + 1.0 / mc_samples)
    return GapCurve(k_candidates=ks, gap=gap, se=se,
                    chosen_k=choose_k_from_curve(ks, gap, se))


def select_k_by_gap(X, k_range=tuple(range(2, 10)), eta1: float = 0.0,
                    eta2: float = 0.0, gamma: float = 0.0, rho: float = 0.01,
                    nu: float = 0.001, tau: float = DEFAULT_TAU,
                    delta: int = DEFAULT_DELTA, epsilon: float = 1e-6,
                    max_outer: int = 100, max_inner: int = 1000,
                    v_mode: str = "paper", mc_samples: int = 100,
                    restarts: int = 10, seed: int = 0, threads: int = 1):
    """Choose the cluster count by the gap statistic on per-k embeddings.

    Each candidate k gets its own solver fit (embedding dimension k - 1);
    the gap and its standard error are computed on that embedding. The
    chosen k is the smallest with gap(k) >= gap(k+1) - se(k+1), falling
    back to the argmax. Candidates whose fit fails are excluded with a
    warning.

    Returns
    -------
    (chosen_k, GapCurve, fits)
        fits maps each surviving candidate k to its FitResult.
    """
    X = check_matrix(X, "X")
    n, p = X.shape
    ks = sorted(set(int(k) for k in k_range))
    for k in ks:
        if k < 2 or k - 1 > min(n, p) or k > n - 1:
            raise ValueError(f"candidate k = {k} out of range for n = {n}, p = {p}")
    graph = build_fusion_graph(X, tau, min(delta, n - 1), rho)

    def work(k):
        inst = ProblemInstance(data=X, k=k, eta1=eta1, eta2=eta2, gamma=gamma,
                               rho=rho, nu=nu, epsilon=epsilon,
                               max_outer=max_outer, max_inner=max_inner,
                               v_mode=v_mode)
        fit = fit_rsodc(inst, graph, seed=child_seed(seed, 5, k))
        emb = fit.embedding
        lw = _log_dispersion(emb, k, restarts, child_seed(seed, 7, k))
        lo, hi = emb.min(axis=0), emb.max(axis=0)
        refs = np.empty(mc_samples)
        for b in range(mc_samples):
            rng_b = np.random.default_rng(child_seed(seed, 8, k, b))
            draw = lo + rng_b.random(emb.shape) * (hi - lo)
            refs[b] = _log_dispersion(draw, k, restarts, child_seed(seed, 9, k, b))
        gap_k = float(refs.mean() - lw)
        se_k = float(refs.std(ddof=0) * np.sqrt(1.0 + 1.0 / mc_samples))
        return k, fit, gap_k, se_k

    def safe(k):
        try:
            return work(k)
        except Exception as exc:
            warnings.warn(f"candidate k = {k} failed: {exc}", RuntimeWarning)
            return None

    results = [r for r in _run_items(ks, safe, threads) if r is not None]
    if not results:
        raise RuntimeError("every candidate k failed")
    ks_ok = [r[0] for r in results]
    gap = np.array([r[2] for r in results])
    se = np.array([r[3] for r in results])
    chosen = choose_k_from_curve(ks_ok, gap, se)
    curve = GapCurve(k_candidates=ks_ok, gap=gap, se=se, chosen_k=chosen)
    fits = {r[0]: r[1] for r in results}
    return chosen, curve, fits
