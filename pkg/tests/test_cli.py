from __future__ import annotations

import csv
import json
import warnings

import numpy as np
import pytest

from rsodc._io import write_matrix_csv
from rsodc.cli import main
from rsodc.datagen import SimulationConfig, generate


@pytest.fixture()
def dataset(tmp_path):
    X, truth = generate(SimulationConfig(n=30, p=20, k=3, theta=2.5, xi=0.5,
                                         seed=3))
    data = tmp_path / "data.csv"
    write_matrix_csv(data, X, [f"v{j + 1}" for j in range(20)])
    truth_path = tmp_path / "truth.csv"
    truth_path.write_text("label\n" + "\n".join(str(t) for t in truth) + "\n")
    return data, truth_path, X, truth


def _run(argv) -> int:
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return main(argv)


def test_fit_writes_all_outputs(dataset, tmp_path):
    data, _, X, _ = dataset
    out = tmp_path / "out"
    rc = _run(["fit", str(data), "--k", "3", "--eta1", "1.0",
               "--gamma", "0.001", "--rho", "0.01", "--out", str(out)])
    assert rc == 0
    for name in ("fit.json", "embedding.csv", "embedding.svg", "scoring.svg"):
        assert (out / name).exists()
    payload = json.loads((out / "fit.json").read_text())
    assert payload["method"] == "rsodc"
    assert payload["k"] == 3
    assert len(payload["labels"]) == 30
    assert min(payload["labels"]) >= 1
    assert len(payload["b_hat"]) == 20
    trace = payload["objective_trace"]
    assert all(later - earlier <= 1e-8 for earlier, later in zip(trace, trace[1:]))
    man = payload["manifest"]
    assert man["command"] == "fit"
    assert "timings" in man and "total" in man["timings"]
    assert man["config"]["eta1"] == 1.0
    # the embedding csv carries one row per subject plus labels
    with open(out / "embedding.csv") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["component_1", "component_2", "label"]
    assert len(rows) == 31


def test_fit_gamma_zero_dispatches_to_the_fusion_free_path(dataset, tmp_path):
    data, _, _, _ = dataset
    out = tmp_path / "out0"
    rc = _run(["fit", str(data), "--k", "3", "--gamma", "0", "--out", str(out)])
    assert rc == 0
    payload = json.loads((out / "fit.json").read_text())
    assert payload["method"] == "sodc"


def test_fit_is_deterministic_modulo_timings(dataset, tmp_path):
    data, _, _, _ = dataset
    args = ["fit", str(data), "--k", "3", "--eta1", "2.0", "--gamma", "0.001",
            "--rho", "0.01", "--seed", "9", "--out", str(tmp_path / "same")]
    assert _run(args) == 0
    first = (tmp_path / "same" / "fit.json").read_text()
    assert _run(args) == 0
    second = (tmp_path / "same" / "fit.json").read_text()
    a, b = json.loads(first), json.loads(second)
    a["manifest"].pop("timings")
    b["manifest"].pop("timings")
    assert a == b


def test_fit_exit_codes(dataset, tmp_path):
    data, _, _, _ = dataset
    assert _run(["fit", str(tmp_path / "absent.csv"), "--k", "3"]) == 2
    assert _run(["fit", str(data), "--k", "1"]) == 2
    assert _run(["fit", str(data), "--k", "3", "--gamma", "0.5",
                 "--rho", "0.01"]) == 2


def test_tune_outputs_table_and_best(dataset, tmp_path):
    data, _, _, _ = dataset
    out = tmp_path / "tune"
    rc = _run(["tune", str(data), "--k", "3", "--grid-eta1", "1,2.5",
               "--grid-gamma", "0.001", "--grid-rho", "0.01",
               "--repeats", "2", "--out", str(out)])
    assert rc == 0
    with open(out / "cv_table.csv") as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == 2
    assert set(rows[0]) == {"eta1", "gamma", "rho", "mean_kappa", "failures",
                            "kappa_1", "kappa_2"}
    best = json.loads((out / "best_params.json").read_text())
    assert best["eta1"] in (1.0, 2.5)
    assert best["manifest"]["command"] == "tune"


def test_tune_rejects_malformed_grid(dataset, tmp_path):
    data, _, _, _ = dataset
    assert _run(["tune", str(data), "--k", "3", "--grid-eta1", "a,b"]) == 2
    assert _run(["tune", str(data), "--k", "3", "--grid-gamma", "1",
                 "--grid-rho", "0.5"]) == 2


def test_select_k_outputs_curve(dataset, tmp_path):
    data, _, _, _ = dataset
    out = tmp_path / "k"
    rc = _run(["select-k", str(data), "--k-min", "2", "--k-max", "4",
               "--mc-samples", "15", "--eta1", "1.0", "--out", str(out)])
    assert rc == 0
    with open(out / "gap_curve.csv") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["k", "gap", "se"]
    assert [r[0] for r in rows[1:]] == ["2", "3", "4"]
    chosen = json.loads((out / "chosen_k.json").read_text())
    assert chosen["chosen_k"] in (2, 3, 4)
    assert len(chosen["gap"]) == 3
    assert _run(["select-k", str(data), "--k-min", "5", "--k-max", "4"]) == 2


def test_simulate_design_1_table_shapes(tmp_path):
    out = tmp_path / "sim1"
    rc = _run(["simulate", "--design", "1", "--replicates", "2", "--n", "24",
               "--out", str(out)])
    assert rc == 0
    with open(out / "replicates.csv") as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == 6
    assert {r["method"] for r in rows} == {"rsodc", "sodc", "tandem"}
    agg = json.loads((out / "simulate.json").read_text())
    assert agg["design"] == 1
    assert agg["failures"] == 0
    assert {row["method"] for row in agg["aggregate"]} == {"rsodc", "sodc",
                                                           "tandem"}


def test_simulate_design_5_fixes_the_dataset(tmp_path):
    out = tmp_path / "sim5"
    rc = _run(["simulate", "--design", "5", "--replicates", "3", "--n", "24",
               "--out", str(out)])
    assert rc == 0
    agg = json.loads((out / "simulate.json").read_text())
    assert agg["aggregate"][0]["replicates"] == 3
    assert "sd_ari" in agg["aggregate"][0]


def test_simulate_aggregate_is_thread_invariant(tmp_path):
    def run(threads, out):
        rc = _run(["simulate", "--design", "2", "--replicates", "2",
                   "--n", "24", "--grid-eta1", "1,2", "--grid-gamma", "0.001",
                   "--grid-rho", "0.01", "--threads", str(threads),
                   "--out", str(out)])
        assert rc == 0
        agg = json.loads((out / "simulate.json").read_text())
        return agg["aggregate"]

    assert run(1, tmp_path / "a") == run(4, tmp_path / "b")


def test_evaluate_reports_metrics(dataset, tmp_path):
    data, truth, _, _ = dataset
    fit_out = tmp_path / "fit"
    assert _run(["fit", str(data), "--k", "3", "--eta1", "1.0",
                 "--out", str(fit_out)]) == 0
    out = tmp_path / "eval"
    rc = _run(["evaluate", "--fit", str(fit_out / "fit.json"),
               "--truth", str(truth), "--informative", "1,2",
               "--data", str(data), "--out", str(out)])
    assert rc == 0
    metrics = json.loads((out / "metrics.json").read_text())
    assert -0.5 <= metrics["ari"] <= 1.0
    assert 0.0 <= metrics["sensitivity"] <= 1.0
    assert 0.0 <= metrics["specificity"] <= 1.0
    assert len(metrics["f_scores"]) == 20
    assert "variance_ratio_embedding" in metrics
    assert "variance_ratio_scoring" in metrics


def test_evaluate_input_validation(dataset, tmp_path):
    data, truth, _, _ = dataset
    assert _run(["evaluate", "--fit", str(tmp_path / "no.json"),
                 "--truth", str(truth)]) == 2
    bogus = tmp_path / "bogus.json"
    bogus.write_text("{\"labels\": [1, 2]}")
    assert _run(["evaluate", "--fit", str(bogus), "--truth", str(truth)]) == 2


def test_threads_env_fallback(dataset, tmp_path, monkeypatch):
    data, _, _, _ = dataset
    out = tmp_path / "env"
    monkeypatch.setenv("RSODC_THREADS", "2")
    assert _run(["fit", str(data), "--k", "3", "--out", str(out)]) == 0
    payload = json.loads((out / "fit.json").read_text())
    assert payload["manifest"]["threads"] == 2
    monkeypatch.setenv("RSODC_THREADS", "zebra")
    assert _run(["fit", str(data), "--k", "3", "--out", str(out)]) == 2


def test_no_header_flag(tmp_path):
    X, _ = generate(SimulationConfig(n=20, p=20, k=2, theta=2.5, xi=0.5, seed=8))
    raw = tmp_path / "raw.csv"
    with open(raw, "w") as fh:
        for row in X:
            fh.write(",".join(f"{v:.17g}" for v in row) + "\n")
    out = tmp_path / "nh"
    assert _run(["fit", str(raw), "--k", "2", "--no-header",
                 "--out", str(out)]) == 0
    payload = json.loads((out / "fit.json").read_text())
    assert len(payload["labels"]) == 20
