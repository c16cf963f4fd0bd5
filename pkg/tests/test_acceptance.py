"""Acceptance suite: one test per release criterion, tolerances pinned.

Each test prints a single PASS line on success (run with -s or -rA to see
them); a failed assertion marks the criterion red in the pytest report.
"""

import json
import math
import time
from pathlib import Path

import numpy as np
import pytest

from plexrecon.cli import main
from plexrecon.core import aggregate_or
from plexrecon.generate import PoissonLaw, SyntheticSpec, generate_multiplex
from plexrecon.harness import (
    ExperimentConfig,
    derive_seed,
    missing_link_budget,
    run_experiment,
)
from plexrecon.metrics import ConfusionCounts, confusion, gmean, mae_delta, mcc
from plexrecon.observe import apply_mask, sample_mask
from plexrecon.solver import (
    SolverConfig,
    a_step,
    e_step,
    initialize,
    m_step,
    m_step_exact,
    random_baseline,
    run,
)

from .conftest import random_net

DATA = Path(__file__).resolve().parent.parent / "data"

LONDON_TABLE = {
    # layer: (active nodes, edges, density x1000, avg degree, gcc size)
    "underground": (260, 225, 6.68, 1.73, 98),
    "overground": (81, 62, 19.14, 1.53, 17),
    "lightrail": (44, 34, 35.94, 1.55, 8),
}
MAFIA_AVG_DEGREE = {"meeting": 5.07, "call": 2.48}
REL_TOL = 0.005


def synthetic_family(layer_count, seed=11):
    return SyntheticSpec(
        node_count=200,
        layer_count=layer_count,
        degree_law=PoissonLaw(3.0),
        overlap=0.6,
        seed=seed,
    )


def mcc_by_method(records):
    out = {}
    for rec in records:
        out.setdefault((rec.method, rec.coverage), []).append(rec.metrics.mcc)
    return out


def test_criterion_1_table_reproduction(capsys):
    started = time.perf_counter()
    assert main(["stats", str(DATA / "london_transport_synthetic.edges")]) == 0
    london_out = capsys.readouterr().out
    assert main(["stats", str(DATA / "sicilian_calls_synthetic.edges")]) == 0
    mafia_out = capsys.readouterr().out
    elapsed = time.perf_counter() - started
    assert elapsed < 1.0

    rows = {
        line.split()[0]: line.split()[1:]
        for line in london_out.strip().split("\n")[1:]
    }
    for layer, (nodes, edges, density, avg_degree, gcc) in LONDON_TABLE.items():
        got = rows[layer]
        assert int(got[0]) == nodes
        assert int(got[1]) == edges
        assert abs(float(got[2]) - density) / density <= REL_TOL
        assert abs(float(got[3]) - avg_degree) / avg_degree <= REL_TOL
        assert int(got[5]) == gcc

    mafia_rows = {
        line.split()[0]: line.split()[1:]
        for line in mafia_out.strip().split("\n")[1:]
    }
    for layer, avg_degree in MAFIA_AVG_DEGREE.items():
        got = float(mafia_rows[layer][3])
        assert abs(got - avg_degree) / avg_degree <= REL_TOL
    print(f"\n[criterion 1] table reproduction: PASS ({elapsed:.2f}s)")


def test_criterion_2_method_ordering():
    started = time.perf_counter()
    cfg = ExperimentConfig(
        dataset=synthetic_family(layer_count=2),
        coverage_grid=(0.4, 0.6, 0.8),
        repetitions=20,
        methods=("ema", "em", "rm"),
        base_seed=101,
    )
    groups = mcc_by_method(run_experiment(cfg))
    elapsed = time.perf_counter() - started
    assert elapsed < 120.0
    for c in (0.4, 0.6, 0.8):
        ema = np.array(groups[("ema", c)])
        em = np.array(groups[("em", c)])
        rm = np.array(groups[("rm", c)])
        assert ema.mean() >= em.mean(), f"EMA < EM at c={c}"
        assert em.mean() >= rm.mean(), f"EM < RM at c={c}"
        assert (ema - em).mean() >= 0.0, f"paired EMA-EM mean negative at c={c}"
    print(f"\n[criterion 2] method ordering EMA >= EM >= RM: PASS ({elapsed:.0f}s)")


def test_criterion_3_benefit_decay_with_layers():
    started = time.perf_counter()
    diffs = {}
    for layers in (2, 4):
        cfg = ExperimentConfig(
            dataset=synthetic_family(layer_count=layers),
            coverage_grid=(0.6,),
            repetitions=20,
            methods=("ema", "em"),
            base_seed=202,
        )
        groups = mcc_by_method(run_experiment(cfg))
        diffs[layers] = np.mean(groups[("ema", 0.6)]) - np.mean(groups[("em", 0.6)])
    elapsed = time.perf_counter() - started
    assert elapsed < 300.0
    ok = diffs[4] <= diffs[2]
    print(
        f"\n[criterion 3] benefit decay with layers: {'PASS' if ok else 'FAIL'} "
        f"(diff2={diffs[2]:+.4f}, diff4={diffs[4]:+.4f}, {elapsed:.0f}s)"
    )
    assert ok, (
        f"EMA-EM gap grew with layers: {diffs[2]:+.4f} (2 layers) -> "
        f"{diffs[4]:+.4f} (4 layers)"
    )


def _convergence_runs(method, tolerance):
    iterations = []
    converged_within = []
    for n in (200, 350, 500):
        spec = SyntheticSpec(
            node_count=n, layer_count=2, degree_law=PoissonLaw(3.0),
            overlap=0.6, seed=n,
        )
        net = generate_multiplex(spec)
        for ci, c in enumerate((0.2, 0.4, 0.6, 0.8)):
            for rep in (0, 1):
                mask = sample_mask(n, 2, c, "per_layer", derive_seed(7, ci, rep, 0))
                obs = apply_mask(net, mask)
                cfg = SolverConfig(
                    method=method, tolerance=tolerance,
                    seed=derive_seed(7, ci, rep, 1),
                )
                rec = run(obs, cfg)
                iterations.append(rec.iterations_used)
                converged_within.append(rec.converged)
    return np.array(iterations), np.array(converged_within)


def test_criterion_4_ema_convergence_budgets():
    iters_5, conv_5 = _convergence_runs("ema", 1e-5)
    within_40 = np.mean(conv_5 & (iters_5 <= 40))
    iters_4, conv_4 = _convergence_runs("ema", 1e-4)
    within_10 = np.mean(conv_4 & (iters_4 <= 10))
    assert within_40 >= 0.9, f"only {within_40:.0%} within 40 iterations at 1e-5"
    assert within_10 >= 0.9, f"only {within_10:.0%} within 10 iterations at 1e-4"
    print(
        f"\n[criterion 4a] EMA budgets: PASS "
        f"({within_40:.0%} <=40it @1e-5, {within_10:.0%} <=10it @1e-4)"
    )


def test_criterion_4_em_iterations_not_above_ema():
    ema_iters, _ = _convergence_runs("ema", 1e-5)
    em_iters, _ = _convergence_runs("em", 1e-5)
    ok = em_iters.mean() <= ema_iters.mean()
    print(
        f"\n[criterion 4b] EM mean iterations <= EMA: {'PASS' if ok else 'FAIL'} "
        f"(EM {em_iters.mean():.1f}, EMA {ema_iters.mean():.1f})"
    )
    assert ok, (
        f"EM mean iterations {em_iters.mean():.1f} exceed EMA's "
        f"{ema_iters.mean():.1f}"
    )


def brute_counts(predicted, net, mask):
    tp = tn = fp = fn = 0
    for k, layer in enumerate(net.layers):
        observed_nodes = set(mask.observed_nodes[k].tolist())
        for i in range(net.node_count):
            for j in range(i + 1, net.node_count):
                if i in observed_nodes and j in observed_nodes:
                    continue
                pred = predicted[k][i, j] == 1
                true = layer.adjacency[i, j] == 1
                tp += pred and true
                fp += pred and not true
                fn += (not pred) and true
                tn += (not pred) and (not true)
    return int(tp), int(tn), int(fp), int(fn)


def brute_mcc(tp, tn, fp, fn):
    denom = (tp + fp) * (tp + fn) * (tn + fp) * (tn + fn)
    if denom == 0:
        return 0.0
    return (tp * tn - fp * fn) / math.sqrt(denom)


def brute_gmean(tp, tn, fp, fn):
    recall = tp / (tp + fn) if tp + fn else 0.0
    specificity = tn / (tn + fp) if tn + fp else 0.0
    return math.sqrt(recall * specificity)


def test_criterion_5_oracle_equivalence():
    rng = np.random.default_rng(515)
    for trial in range(200):
        net = random_net(rng)
        n, m = net.node_count, net.layer_count
        coverage = float(rng.uniform(0.5, 1.0))
        mask = sample_mask(n, m, coverage, "per_layer", seed=trial)
        predicted = rng.integers(0, 2, size=(m, n, n)).astype(np.uint8)
        predicted = np.triu(predicted, 1)
        predicted = predicted + predicted.transpose(0, 2, 1)

        counts = confusion(predicted, net, mask)
        tp, tn, fp, fn = brute_counts(predicted, net, mask)
        assert (counts.tp, counts.tn, counts.fp, counts.fn) == (tp, tn, fp, fn)
        assert abs(mcc(counts) - brute_mcc(tp, tn, fp, fn)) <= 1e-12
        assert abs(gmean(counts) - brute_gmean(tp, tn, fp, fn)) <= 1e-12

        prev = rng.random((m, n, n))
        nxt = rng.random((m, n, n))
        total, cells = 0.0, 0
        for k in range(m):
            observed_nodes = set(mask.observed_nodes[k].tolist())
            for i in range(n):
                for j in range(i + 1, n):
                    if i in observed_nodes and j in observed_nodes:
                        continue
                    total += abs(nxt[k, i, j] - prev[k, i, j])
                    cells += 1
        expected = total / cells if cells else 0.0
        assert abs(mae_delta(prev, nxt, mask) - expected) <= 1e-12

        agg = aggregate_or(net)
        for i in range(n):
            for j in range(n):
                want = 1 if any(l.adjacency[i, j] == 1 for l in net.layers) else 0
                assert agg[i, j] == want
    print("\n[criterion 5] oracle equivalence on 200 fuzzed instances: PASS")


def test_criterion_6_solver_invariants():
    rng = np.random.default_rng(1234)
    worst_rel = 0.0
    for trial in range(100):
        n = int(rng.integers(260, 421))
        layers = int(rng.integers(2, 4))
        c = float(rng.uniform(0.6, 0.9))
        mean_deg = float(rng.uniform(2.5, 3.2))
        method = "ema" if rng.random() < 0.5 else "em"
        net = generate_multiplex(
            SyntheticSpec(
                node_count=n, layer_count=layers,
                degree_law=PoissonLaw(mean_deg), overlap=0.6, seed=trial,
            )
        )
        mask = sample_mask(n, layers, c, "per_layer", trial)
        obs = apply_mask(net, mask)
        cfg = SolverConfig(method=method, seed=trial)
        state = initialize(obs, cfg)
        for _ in range(12):
            state = e_step(state, obs)
            if method == "ema":
                state = a_step(state, obs, tau=cfg.aggregate_threshold)
            approx = m_step(state)
            exact = m_step_exact(state)
            for k in range(layers):
                if state.edge_estimates[k] >= 50:
                    d_a, d_e = approx.degrees[k], exact.degrees[k]
                    mask_pos = d_a > 1e-9
                    rel = float(
                        np.max(np.abs(d_e[mask_pos] - d_a[mask_pos]) / d_a[mask_pos])
                    )
                    worst_rel = max(worst_rel, rel)
                    assert rel < 0.05
            state = approx
            assert np.array_equal(
                state.prob[obs.defined], obs.values[obs.defined].astype(float)
            )
            assert np.array_equal(state.prob, state.prob.transpose(0, 2, 1))
            assert state.prob.min() >= 0.0 and state.prob.max() <= 1.0
            assert not state.prob.diagonal(axis1=1, axis2=2).any()
            assert np.all(state.degrees.sum(axis=1) == 2.0 * state.edge_estimates)
    print(
        f"\n[criterion 6] solver invariants over 100 fuzzed runs: PASS "
        f"(worst exact-vs-approx deviation {worst_rel:.2%})"
    )


def test_criterion_7_random_baseline_calibration():
    spec = SyntheticSpec(
        node_count=100, layer_count=2, degree_law=PoissonLaw(3.0),
        overlap=0.6, seed=5,
    )
    net = generate_multiplex(spec)
    values = []
    for s in range(100):
        mask = sample_mask(100, 2, 0.5, "per_layer", derive_seed(7, 0, s, 0))
        obs = apply_mask(net, mask)
        budget = missing_link_budget(net, mask)
        rec = random_baseline(obs, budget, derive_seed(7, 0, s, 2))
        values.append(mcc(confusion(rec.predicted, net, mask)))
    mean = float(np.mean(values))
    assert -0.05 <= mean <= 0.05
    print(f"\n[criterion 7] random-baseline calibration: PASS (mean MCC {mean:+.4f})")


def test_criterion_8_cli_determinism(tmp_path):
    spec = json.dumps(
        {
            "node_count": 60, "layer_count": 2,
            "degree_law": "poisson:3", "overlap": 0.6, "seed": 12,
        }
    )
    outputs = []
    manifests = []
    for name in ("first", "second"):
        out_dir = tmp_path / name
        code = main([
            "experiment", "--synthetic-spec", spec,
            "--coverages", "0.4,0.8", "--reps", "2",
            "--methods", "ema,em,rm", "--seed", "77",
            "--max-iters", "60", "--out", str(out_dir),
        ])
        assert code == 0
        outputs.append(
            (
                (out_dir / "runs.csv").read_bytes(),
                (out_dir / "summary.csv").read_bytes(),
            )
        )
        manifest = json.loads((out_dir / "manifest.json").read_text())
        manifest.pop("created_at")
        manifests.append(manifest)
    assert outputs[0] == outputs[1]
    assert manifests[0] == manifests[1]
    print("\n[criterion 8] CLI byte-identical determinism: PASS")
