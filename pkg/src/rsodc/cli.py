"""Command-line surface: fit, tune, select-k, simulate, and evaluate.

Every command writes its results under --out (default rsodc_out) and embeds
a manifest with the resolved configuration in each JSON file. Exit codes:
0 success, 1 internal error, 2 bad input.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
import traceback
import warnings
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import __version__
from ._io import (
    InputError,
    jsonable,
    read_labels_csv,
    read_matrix_csv,
    write_json,
    write_matrix_csv,
    write_rows_csv,
)
from ._svg import scatter_svg
from .core import ProblemInstance, child_seed
from .datagen import SimulationConfig, generate
from .fusion_graph import DEFAULT_DELTA, DEFAULT_TAU, build_fusion_graph
from .metrics import (
    adjusted_rand_index,
    anova_f_scores,
    sensitivity_specificity,
    variance_ratio,
)
from .model_selection import ParamGrid, select_k_by_gap, stability_cv
from .solver import fit_rsodc, fit_sodc, tandem_baseline

SIM_GRID_TAU = (0.001, 0.005, 0.01, 0.05, 0.1)
SIM_GRID_DELTA = tuple(range(5, 60, 5))


def _threads(args) -> int:
    if args.threads is not None:
        return max(1, args.threads)
    env = os.environ.get("RSODC_THREADS", "").strip()
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise InputError(f"RSODC_THREADS must be an integer, got {env!r}")
    return 1


def _pool_map(items, fn, threads: int) -> list:
    if threads <= 1:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def _float_list(text: str, flag: str) -> tuple:
    try:
        values = tuple(float(tok) for tok in text.split(",") if tok.strip())
    except ValueError:
        raise InputError(f"{flag} expects comma-separated numbers, got {text!r}")
    if not values:
        raise InputError(f"{flag} is empty")
    return values


def _int_list(text: str, flag: str) -> tuple:
    try:
        values = tuple(int(tok) for tok in text.split(",") if tok.strip())
    except ValueError:
        raise InputError(f"{flag} expects comma-separated integers, got {text!r}")
    if not values:
        raise InputError(f"{flag} is empty")
    return values


def _config_of(args) -> dict:
    cfg = {k: v for k, v in vars(args).items() if k != "func"}
    return jsonable(cfg)


def _manifest(args, inputs, outputs, timings, threads) -> dict:
    return {
        "command": args.command,
        "version": __version__,
        "seed": int(args.seed),
        "threads": int(threads),
        "config": _config_of(args),
        "inputs": [str(p) for p in inputs],
        "outputs": list(outputs),
        "timings": {k: float(v) for k, v in timings.items()},
    }


def _instance(X, k, args) -> ProblemInstance:
    try:
        return ProblemInstance(data=X, k=k, eta1=args.eta1, eta2=args.eta2,
                               gamma=args.gamma, rho=args.rho, nu=args.nu,
                               epsilon=args.epsilon, max_outer=args.max_outer,
                               max_inner=args.max_inner, v_mode=args.v_mode)
    except ValueError as exc:
        raise InputError(str(exc)) from exc


def _clamped_delta(delta: int, n: int) -> int:
    if delta > n - 1:
        warnings.warn(f"neighbor count {delta} capped at n - 1 = {n - 1}",
                      RuntimeWarning)
        return n - 1
    return delta


def cmd_fit(args) -> int:
    X = read_matrix_csv(args.csv, header=not args.no_header)
    threads = _threads(args)
    t0 = time.perf_counter()
    inst = _instance(X, args.k, args)
    if args.gamma == 0.0:
        fit = fit_sodc(inst, seed=args.seed)
        method = "sodc"
    else:
        try:
            graph = build_fusion_graph(X, args.tau,
                                       _clamped_delta(args.delta, X.shape[0]),
                                       args.rho)
        except ValueError as exc:
            raise InputError(str(exc)) from exc
        fit = fit_rsodc(inst, graph, seed=args.seed)
        method = "rsodc"
    elapsed = time.perf_counter() - t0

    os.makedirs(args.out, exist_ok=True)
    outputs = ["fit.json", "embedding.csv", "embedding.svg", "scoring.svg"]
    d = fit.embedding.shape[1]
    write_matrix_csv(os.path.join(args.out, "embedding.csv"), fit.embedding,
                     [f"component_{c + 1}" for c in range(d)], labels=fit.labels)
    scatter_svg(fit.embedding, fit.labels, os.path.join(args.out, "embedding.svg"),
                title="discriminant embedding")
    scatter_svg(fit.Y_hat, fit.labels, os.path.join(args.out, "scoring.svg"),
                title="scoring matrix")
    payload = {
        "method": method,
        "k": args.k,
        "params": {"eta1": args.eta1, "eta2": args.eta2, "gamma": args.gamma,
                   "rho": args.rho, "nu": args.nu, "tau": args.tau,
                   "delta": args.delta, "epsilon": args.epsilon,
                   "max_outer": args.max_outer, "max_inner": args.max_inner,
                   "v_mode": args.v_mode},
        "b_hat": fit.B_hat,
        "y_hat": fit.Y_hat,
        "embedding": fit.embedding,
        "labels": fit.labels,
        "objective_trace": fit.objective_trace,
        "converged": fit.converged,
        "status": fit.status,
        "outer_iters": fit.outer_iters,
        "inner_iterations": fit.inner_iterations,
        "diagnostics": fit.diagnostics,
        "manifest": _manifest(args, [args.csv], outputs,
                              dict(fit.timings, command=elapsed), threads),
    }
    write_json(os.path.join(args.out, "fit.json"), payload, "fit.schema.json")
    print(f"{method}: status={fit.status} objective={fit.objective_trace[-1]:.6g} "
          f"outer_iters={fit.outer_iters} -> {args.out}/")
    return 0


def cmd_tune(args) -> int:
    X = read_matrix_csv(args.csv, header=not args.no_header)
    threads = _threads(args)
    try:
        grid = ParamGrid(
            eta1_candidates=_float_list(args.grid_eta1, "--grid-eta1"),
            gamma_candidates=_float_list(args.grid_gamma, "--grid-gamma"),
            rho_candidates=_float_list(args.grid_rho, "--grid-rho"),
            repeats=args.repeats)
        combos = grid.combos
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    t0 = time.perf_counter()
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        best, table = stability_cv(X, args.k, grid, tau=args.tau, delta=args.delta,
                                   seed=args.seed, eta2=args.eta2, nu=args.nu,
                                   epsilon=args.epsilon, max_outer=args.max_outer,
                                   max_inner=args.max_inner, v_mode=args.v_mode,
                                   threads=threads)
    elapsed = time.perf_counter() - t0

    os.makedirs(args.out, exist_ok=True)
    outputs = ["cv_table.csv", "best_params.json"]
    header = (["eta1", "gamma", "rho", "mean_kappa", "failures"]
              + [f"kappa_{r + 1}" for r in range(grid.repeats)])
    rows = [[row["eta1"], row["gamma"], row["rho"], row["mean_kappa"],
             row["failures"]] + row["kappas"] for row in table]
    write_rows_csv(os.path.join(args.out, "cv_table.csv"), header, rows)
    payload = dict(best)
    payload["manifest"] = _manifest(args, [args.csv], outputs,
                                    {"command": elapsed}, threads)
    write_json(os.path.join(args.out, "best_params.json"), payload,
               "best_params.schema.json")
    print(f"best of {len(combos)} combos: eta1={best['eta1']} gamma={best['gamma']} "
          f"rho={best['rho']} mean_kappa={best['mean_kappa']:.4f} -> {args.out}/")
    return 0


def cmd_select_k(args) -> int:
    X = read_matrix_csv(args.csv, header=not args.no_header)
    threads = _threads(args)
    if args.k_min < 2 or args.k_max < args.k_min:
        raise InputError("need 2 <= k-min <= k-max")
    t0 = time.perf_counter()
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)
            chosen, curve, _ = select_k_by_gap(
                X, range(args.k_min, args.k_max + 1), eta1=args.eta1,
                eta2=args.eta2, gamma=args.gamma, rho=args.rho, nu=args.nu,
                tau=args.tau, delta=args.delta, epsilon=args.epsilon,
                max_outer=args.max_outer, max_inner=args.max_inner,
                v_mode=args.v_mode, mc_samples=args.mc_samples,
                restarts=args.restarts, seed=args.seed, threads=threads)
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    elapsed = time.perf_counter() - t0

    os.makedirs(args.out, exist_ok=True)
    outputs = ["gap_curve.csv", "chosen_k.json"]
    rows = [[k, float(g), float(s)]
            for k, g, s in zip(curve.k_candidates, curve.gap, curve.se)]
    write_rows_csv(os.path.join(args.out, "gap_curve.csv"),
                   ["k", "gap", "se"], rows)
    payload = {
        "chosen_k": chosen,
        "k_candidates": curve.k_candidates,
        "gap": curve.gap,
        "se": curve.se,
        "manifest": _manifest(args, [args.csv], outputs,
                              {"command": elapsed}, threads),
    }
    write_json(os.path.join(args.out, "chosen_k.json"), payload,
               "chosen_k.schema.json")
    print(f"chosen k = {chosen} over candidates {curve.k_candidates} -> {args.out}/")
    return 0


def _sim_config(args, seed) -> SimulationConfig:
    try:
        return SimulationConfig(n=args.n, p=args.p, k=args.k, theta=args.theta,
                                xi=args.xi, q=args.q, c_star=args.c_star,
                                xi_dagger=args.xi_dagger, seed=seed)
    except ValueError as exc:
        raise InputError(str(exc)) from exc


def _sim_fit(X, truth, args, eta1, gamma, rho, tau, delta, seed):
    inst = ProblemInstance(data=X, k=args.k, eta1=eta1, eta2=args.eta2,
                           gamma=gamma, rho=rho, nu=args.nu,
                           epsilon=args.epsilon, max_outer=args.max_outer,
                           max_inner=args.max_inner, v_mode=args.v_mode)
    t0 = time.perf_counter()
    if gamma == 0.0:
        fit = fit_sodc(inst, seed=seed)
    else:
        graph = build_fusion_graph(X, tau, min(delta, X.shape[0] - 1), rho)
        fit = fit_rsodc(inst, graph, seed=seed)
    seconds = time.perf_counter() - t0
    ari = adjusted_rand_index(truth, fit.labels)
    return fit, ari, seconds


def _median(values) -> float:
    return float(np.median(np.asarray(values, dtype=float)))


def cmd_simulate(args) -> int:
    threads = _threads(args)
    reps = args.replicates
    if reps < 1:
        raise InputError("--replicates must be >= 1")
    t0 = time.perf_counter()
    failures = []

    def guarded(fn, item):
        try:
            return fn(item)
        except Exception as exc:
            failures.append(f"{item}: {exc}")
            warnings.warn(f"replicate item {item} failed: {exc}", RuntimeWarning)
            return None

    # all designs draw one dataset per replicate from the same stream
    datasets = None
    if args.design in (1, 2, 4):
        datasets = [generate(_sim_config(args, child_seed(args.seed, 21, r)))
                    for r in range(reps)]
    elif args.design == 5:
        datasets = [generate(_sim_config(args, child_seed(args.seed, 21, 0)))]

    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        if args.design == 1:
            rep_header = ["replicate", "method", "ari", "seconds",
                          "outer_iters", "convergence_count"]

            def run1(item):
                r, method = item
                X, truth = datasets[r]
                seed = child_seed(args.seed, 22, r)
                if method == "tandem":
                    t1 = time.perf_counter()
                    fit = tandem_baseline(X, args.k, seed=seed)
                    sec = time.perf_counter() - t1
                    ari = adjusted_rand_index(truth, fit.labels)
                else:
                    gamma = args.gamma if method == "rsodc" else 0.0
                    fit, ari, sec = _sim_fit(X, truth, args, args.eta1, gamma,
                                             args.rho, args.tau, args.delta, seed)
                cc = fit.diagnostics.get("convergence_count", 0)
                return [r, method, float(ari), sec, fit.outer_iters, cc]

            items = [(r, m) for r in range(reps)
                     for m in ("rsodc", "sodc", "tandem")]
            rows = [x for x in _pool_map(items, lambda it: guarded(run1, it),
                                         threads) if x is not None]
            aggregate = []
            for m in ("rsodc", "sodc", "tandem"):
                aris = [row[2] for row in rows if row[1] == m]
                secs = [row[3] for row in rows if row[1] == m]
                if aris:
                    aggregate.append({"method": m, "median_ari": _median(aris),
                                      "mean_ari": float(np.mean(aris)),
                                      "median_seconds": _median(secs),
                                      "replicates": len(aris)})
            agg_header = ["method", "median_ari", "mean_ari", "median_seconds",
                          "replicates"]

        elif args.design == 2:
            grid = ParamGrid(eta1_candidates=_float_list(args.grid_eta1, "--grid-eta1"),
                             gamma_candidates=_float_list(args.grid_gamma, "--grid-gamma"),
                             rho_candidates=_float_list(args.grid_rho, "--grid-rho"))
            combos = grid.combos
            rep_header = ["replicate", "eta1", "gamma", "rho", "ari", "seconds"]

            def run2(item):
                r, (eta1, gamma, rho) = item
                X, truth = datasets[r]
                _, ari, sec = _sim_fit(X, truth, args, eta1, gamma, rho,
                                       args.tau, args.delta,
                                       child_seed(args.seed, 22, r))
                return [r, eta1, gamma, rho, float(ari), sec]

            items = [(r, c) for r in range(reps) for c in combos]
            rows = [x for x in _pool_map(items, lambda it: guarded(run2, it),
                                         threads) if x is not None]
            aggregate = []
            for eta1, gamma, rho in combos:
                aris = [row[4] for row in rows
                        if (row[1], row[2], row[3]) == (eta1, gamma, rho)]
                if aris:
                    aggregate.append({"eta1": eta1, "gamma": gamma, "rho": rho,
                                      "median_ari": _median(aris),
                                      "mean_ari": float(np.mean(aris)),
                                      "replicates": len(aris)})
            agg_header = ["eta1", "gamma", "rho", "median_ari", "mean_ari",
                          "replicates"]

        elif args.design == 3:
            rep_header = ["replicate", "true_k", "chosen_k"]

            def run3(r):
                X, _ = generate(_sim_config(args, child_seed(args.seed, 21, r)))
                chosen, _, _ = select_k_by_gap(
                    X, range(args.k_min, args.k_max + 1), eta1=args.eta1,
                    eta2=args.eta2, gamma=args.gamma, rho=args.rho, nu=args.nu,
                    tau=args.tau, delta=args.delta, epsilon=args.epsilon,
                    max_outer=args.max_outer, max_inner=args.max_inner,
                    v_mode=args.v_mode, mc_samples=args.mc_samples,
                    seed=child_seed(args.seed, 22, r).generate_state(1)[0].item(),
                    threads=1)
                return [r, args.k, chosen]

            rows = [x for x in _pool_map(list(range(reps)),
                                         lambda it: guarded(run3, it), threads)
                    if x is not None]
            counts = {}
            for row in rows:
                counts[row[2]] = counts.get(row[2], 0) + 1
            aggregate = [{"chosen_k": k, "count": c, "true_k": args.k}
                         for k, c in sorted(counts.items())]
            agg_header = ["chosen_k", "count", "true_k"]

        elif args.design == 4:
            taus = _float_list(args.grid_tau, "--grid-tau")
            deltas = _int_list(args.grid_delta, "--grid-delta")
            informative = tuple(range(1, args.q + 1))
            rep_header = ["replicate", "tau", "delta", "ari", "sensitivity",
                          "specificity", "seconds", "convergence_count"]

            def run4(item):
                r, tau, delta = item
                X, truth = datasets[r]
                fit, ari, sec = _sim_fit(X, truth, args, args.eta1, args.gamma,
                                         args.rho, tau, delta,
                                         child_seed(args.seed, 22, r))
                sens, spec = sensitivity_specificity(fit.B_hat, informative, args.k)
                cc = fit.diagnostics.get("convergence_count", 0)
                return [r, tau, delta, float(ari), sens, spec, sec, cc]

            items = [(r, tau, delta) for r in range(reps)
                     for tau in taus for delta in deltas]
            rows = [x for x in _pool_map(items, lambda it: guarded(run4, it),
                                         threads) if x is not None]
            aggregate = []
            for tau in taus:
                for delta in deltas:
                    sub = [row for row in rows if (row[1], row[2]) == (tau, delta)]
                    if sub:
                        aggregate.append({
                            "tau": tau, "delta": delta,
                            "median_ari": _median([r[3] for r in sub]),
                            "median_sensitivity": _median([r[4] for r in sub]),
                            "median_specificity": _median([r[5] for r in sub]),
                            "median_convergence_count": _median([r[7] for r in sub]),
                            "replicates": len(sub)})
            agg_header = ["tau", "delta", "median_ari", "median_sensitivity",
                          "median_specificity", "median_convergence_count",
                          "replicates"]

        elif args.design == 5:
            rep_header = ["replicate", "ari", "seconds", "convergence_count"]
            X, truth = datasets[0]

            def run5(r):
                fit, ari, sec = _sim_fit(X, truth, args, args.eta1, args.gamma,
                                         args.rho, args.tau, args.delta,
                                         child_seed(args.seed, 22, r))
                cc = fit.diagnostics.get("convergence_count", 0)
                return [r, float(ari), sec, cc]

            rows = [x for x in _pool_map(list(range(reps)),
                                         lambda it: guarded(run5, it), threads)
                    if x is not None]
            aris = [row[1] for row in rows]
            aggregate = [{"median_ari": _median(aris),
                          "mean_ari": float(np.mean(aris)),
                          "sd_ari": float(np.std(aris, ddof=0)),
                          "median_convergence_count": _median([r[3] for r in rows]),
                          "replicates": len(rows)}] if aris else []
            agg_header = ["median_ari", "mean_ari", "sd_ari",
                          "median_convergence_count", "replicates"]
        else:
            raise InputError(f"unknown design {args.design}")

    elapsed = time.perf_counter() - t0
    os.makedirs(args.out, exist_ok=True)
    outputs = ["replicates.csv", "aggregate.csv", "simulate.json"]
    write_rows_csv(os.path.join(args.out, "replicates.csv"), rep_header, rows)
    write_rows_csv(os.path.join(args.out, "aggregate.csv"), agg_header,
                   [[row[h] for h in agg_header] for row in aggregate])
    payload = {
        "design": args.design,
        "replicates": reps,
        "aggregate": aggregate,
        "failures": len(failures),
        "manifest": _manifest(args, [], outputs, {"command": elapsed}, threads),
    }
    write_json(os.path.join(args.out, "simulate.json"), payload,
               "simulate.schema.json")
    print(f"design {args.design}: {len(rows)} rows, {len(failures)} failures "
          f"-> {args.out}/")
    return 0


def cmd_evaluate(args) -> int:
    try:
        with open(args.fit, encoding="utf-8") as handle:
            fit = json.load(handle)
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read {args.fit}: {exc}") from exc
    for key in ("labels", "embedding", "y_hat", "b_hat", "k"):
        if key not in fit:
            raise InputError(f"{args.fit} lacks key {key!r}")
    labels = np.asarray(fit["labels"], dtype=int)
    truth = read_labels_csv(args.truth, header=not args.no_header)
    if truth.shape[0] != labels.shape[0]:
        raise InputError(f"truth has {truth.shape[0]} rows, fit has "
                         f"{labels.shape[0]}")
    t0 = time.perf_counter()
    metrics = {"ari": float(adjusted_rand_index(truth, labels))}
    for key, points in (("variance_ratio_embedding", fit["embedding"]),
                        ("variance_ratio_scoring", fit["y_hat"])):
        try:
            metrics[key] = variance_ratio(np.asarray(points, dtype=float), labels)
        except ValueError as exc:
            warnings.warn(f"{key} unavailable: {exc}", RuntimeWarning)
    if args.informative:
        idx = _int_list(args.informative, "--informative")
        try:
            sens, spec = sensitivity_specificity(
                np.asarray(fit["b_hat"], dtype=float), idx, int(fit["k"]))
        except ValueError as exc:
            raise InputError(str(exc)) from exc
        metrics["sensitivity"] = sens
        metrics["specificity"] = spec
    if args.data:
        X = read_matrix_csv(args.data, header=not args.no_header)
        if X.shape[0] != labels.shape[0]:
            raise InputError(f"data has {X.shape[0]} rows, fit has "
                             f"{labels.shape[0]}")
        metrics["f_scores"] = anova_f_scores(X, labels)
    elapsed = time.perf_counter() - t0

    os.makedirs(args.out, exist_ok=True)
    inputs = [args.fit, args.truth] + ([args.data] if args.data else [])
    metrics["manifest"] = _manifest(args, inputs, ["metrics.json"],
                                    {"command": elapsed}, _threads(args))
    write_json(os.path.join(args.out, "metrics.json"), metrics,
               "metrics.schema.json")
    print(f"ari={metrics['ari']:.4f} -> {args.out}/")
    return 0


def _add_common(p) -> None:
    p.add_argument("--seed", type=int, default=0, help="master random seed")
    p.add_argument("--threads", type=int, default=None,
                   help="worker threads (default: RSODC_THREADS or 1)")
    p.add_argument("--out", default="rsodc_out", help="output directory")


def _add_solver(p, eta1=0.0, gamma=0.0, rho=0.01) -> None:
    p.add_argument("--eta1", type=float, default=eta1, help="row-sparsity weight")
    p.add_argument("--eta2", type=float, default=0.0, help="ridge weight")
    p.add_argument("--gamma", type=float, default=gamma, help="fusion weight")
    p.add_argument("--rho", type=float, default=rho,
                   help="augmented-Lagrangian weight")
    p.add_argument("--nu", type=float, default=0.001, help="B-update step size")
    p.add_argument("--tau", type=float, default=DEFAULT_TAU,
                   help="neighbor weight decay rate")
    p.add_argument("--delta", type=int, default=DEFAULT_DELTA,
                   help="nearest-neighbor count for fusion weights")
    p.add_argument("--epsilon", type=float, default=1e-6,
                   help="convergence threshold")
    p.add_argument("--max-outer", type=int, default=100)
    p.add_argument("--max-inner", type=int, default=1000)
    p.add_argument("--v-mode", choices=("paper", "exact"), default="paper",
                   help="fusion-difference update: damped one-step or exact "
                        "shrinkage")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rsodc",
        description="Sparse discriminant clustering with a fusion penalty")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fit", help="fit one model on a CSV matrix")
    p.add_argument("csv", help="input matrix, rows = subjects")
    p.add_argument("--k", type=int, required=True, help="cluster count")
    p.add_argument("--no-header", action="store_true",
                   help="input CSV has no header row")
    _add_solver(p)
    _add_common(p)
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("tune", help="stability cross-validation over a weight grid")
    p.add_argument("csv")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--no-header", action="store_true")
    p.add_argument("--grid-eta1", default="0.1,0.5,1,1.5,2,2.5,3")
    p.add_argument("--grid-gamma", default="0.001,0.003,0.005,0.007,0.01")
    p.add_argument("--grid-rho", default="0.01,0.03,0.05,0.07,0.1")
    p.add_argument("--repeats", type=int, default=10,
                   help="random half-splits per combination")
    _add_solver(p)
    _add_common(p)
    p.set_defaults(func=cmd_tune)

    p = sub.add_parser("select-k", help="choose the cluster count by gap statistic")
    p.add_argument("csv")
    p.add_argument("--k-min", type=int, default=2)
    p.add_argument("--k-max", type=int, default=9)
    p.add_argument("--mc-samples", type=int, default=100,
                   help="reference draws per candidate")
    p.add_argument("--restarts", type=int, default=10,
                   help="k-means restarts inside the gap computation")
    p.add_argument("--no-header", action="store_true")
    _add_solver(p)
    _add_common(p)
    p.set_defaults(func=cmd_select_k)

    p = sub.add_parser("simulate", help="run a synthetic study design")
    p.add_argument("--design", type=int, required=True, choices=(1, 2, 3, 4, 5))
    p.add_argument("--replicates", type=int, default=20)
    p.add_argument("--n", type=int, default=60)
    p.add_argument("--p", type=int, default=20)
    p.add_argument("--k", type=int, default=3, help="true cluster count")
    p.add_argument("--theta", type=float, default=2.2, help="centroid distance")
    p.add_argument("--xi", type=float, default=0.5,
                   help="informative-block correlation")
    p.add_argument("--q", type=int, default=2, help="informative variable count")
    p.add_argument("--c-star", type=int, default=None,
                   help="correlated-noise count (default: by p)")
    p.add_argument("--xi-dagger", type=float, default=0.6,
                   help="correlated-noise correlation")
    p.add_argument("--grid-eta1", default="0.1,0.5,1,1.5,2,2.5,3",
                   help="design 2 sweep values")
    p.add_argument("--grid-gamma", default="0.001,0.003,0.005,0.007,0.01")
    p.add_argument("--grid-rho", default="0.01,0.03,0.05,0.07,0.1")
    p.add_argument("--grid-tau", default=",".join(str(v) for v in SIM_GRID_TAU),
                   help="design 4 sweep values")
    p.add_argument("--grid-delta", default=",".join(str(v) for v in SIM_GRID_DELTA))
    p.add_argument("--k-min", type=int, default=2, help="design 3 candidate floor")
    p.add_argument("--k-max", type=int, default=9, help="design 3 candidate cap")
    p.add_argument("--mc-samples", type=int, default=100)
    _add_solver(p, eta1=2.5, gamma=0.001, rho=0.01)
    _add_common(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("evaluate", help="score a fit against ground truth")
    p.add_argument("--fit", required=True, help="fit.json from the fit command")
    p.add_argument("--truth", required=True, help="CSV with true labels")
    p.add_argument("--informative", default=None,
                   help="comma-separated 1-based signal rows of B")
    p.add_argument("--data", default=None,
                   help="original matrix CSV for per-variable F scores")
    p.add_argument("--no-header", action="store_true")
    _add_common(p)
    p.set_defaults(func=cmd_evaluate)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception:
        traceback.print_exc()
        return 1


if __name__ == "__main__":
    sys.exit(main())
