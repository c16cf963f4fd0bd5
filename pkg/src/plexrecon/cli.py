"""Command-line interface: stats, reconstruct, experiment, generate.

Exit codes: 0 success, 2 input/parameter error, 3 solver precondition
failure.  Every subcommand is deterministic given its flags; the only
wall-clock value ever written is the manifest timestamp.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import asdict
from pathlib import Path

from .core import LayerGraph, MultiplexNetwork, layer_stats
from .errors import (
    CoverageError,
    EmptyLayerError,
    GenerationError,
    ParseError,
    SolverError,
)
from .generate import SyntheticSpec, generate_multiplex, parse_degree_law
from .harness import (
    ExperimentConfig,
    derive_seed,
    missing_link_budget,
    run_experiment,
    summarize,
)
from .io_formats import (
    dataset_digest,
    load_multiplex,
    parse_multiplex,
    serialize_multiplex,
    write_manifest,
    write_results,
    write_summary,
    write_trace,
)
from .metrics import confusion, metric_report
from .observe import apply_mask, sample_mask
from .solver import SolverConfig, run

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_SOLVER = 3

STATS_COLUMNS = (
    "layer", "active_nodes", "edges", "density_x1000",
    "avg_degree", "mean_cc_size", "gcc_size", "cov_cc_size",
)


def _read_network(path: str) -> MultiplexNetwork:
    if path == "-":
        return parse_multiplex(sys.stdin)
    return load_multiplex(path)


def _parse_coverages(text: str) -> tuple[float, ...]:
    """Accept 'a,b,c' lists and 'start:stop:step' grids (inclusive stop)."""
    text = text.strip()
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ValueError(f"bad coverage grid {text!r} (want start:stop:step)")
        start, stop, step = (float(p) for p in parts)
        if step <= 0:
            raise ValueError("coverage grid step must be positive")
        values = []
        x = start
        while x <= stop + 1e-9:
            values.append(round(x, 10))
            x += step
        return tuple(values)
    return tuple(float(p) for p in text.split(",") if p.strip())


def _solver_config(args, method: str) -> SolverConfig:
    return SolverConfig(
        method=method,
        tolerance=args.tol,
        max_iterations=args.max_iters,
        binarization=args.binarize,
        seed=0,  # overridden per run
    )


def cmd_stats(args) -> int:
    net = _read_network(args.input)
    layer_labels = net.layer_labels or tuple(
        str(k + 1) for k in range(net.layer_count)
    )
    print(" ".join(STATS_COLUMNS))
    for k, layer in enumerate(net.layers):
        try:
            s = layer_stats(layer)
        except EmptyLayerError:
            print(f"{layer_labels[k]} empty")
            continue
        print(
            f"{layer_labels[k]} {s.active_nodes} {s.edges} "
            f"{s.density * 1e3:.2f} {s.avg_degree:.2f} {s.mean_cc_size:.2f} "
            f"{s.gcc_size} {s.cov_cc_size:.2f}"
        )
    return EXIT_OK


def cmd_reconstruct(args) -> int:
    net = _read_network(args.input)
    mask = sample_mask(
        net.node_count,
        net.layer_count,
        args.coverage,
        args.sharing,
        derive_seed(args.seed, 0, 0, 0),
    )
    obs = apply_mask(net, mask)
    budget = missing_link_budget(net, mask)
    if args.method == "rm":
        cfg = SolverConfig(method="rm", seed=derive_seed(args.seed, 0, 0, 2))
    else:
        cfg = SolverConfig(
            method=args.method,
            tolerance=args.tol,
            max_iterations=args.max_iters,
            binarization=args.binarize,
            seed=derive_seed(args.seed, 0, 0, 1),
        )
    result = run(obs, cfg, link_budget=budget)

    prefix = args.out_prefix
    layer_labels = net.layer_labels or tuple(
        str(k + 1) for k in range(net.layer_count)
    )
    for k in range(net.layer_count):
        single = MultiplexNetwork(
            node_count=net.node_count,
            layers=(LayerGraph(result.predicted[k]),),
            node_labels=net.node_labels,
            layer_labels=(layer_labels[k],),
        )
        out_path = Path(f"{prefix}_layer{k + 1}.edges")
        with open(out_path, "w", encoding="utf-8") as handle:
            serialize_multiplex(single, handle)

    total_unobserved = sum(
        int(obs.unobserved(k).sum()) // 2 for k in range(net.layer_count)
    )
    payload = {
        "method": args.method,
        "coverage": args.coverage,
        "seed": args.seed,
        "layers": net.layer_count,
        "converged": result.converged,
        "iterations": result.iterations_used,
    }
    if total_unobserved == 0:
        payload["metrics"] = {}
        payload["note"] = "no unobserved entries"
        summary = "MCC=n/a G-mean=n/a"
    else:
        counts = confusion(result.predicted, net, mask, scope="pooled")
        report = metric_report(counts)
        payload["metrics"] = {
            "mcc": report.mcc,
            "gmean": report.gmean,
            "recall": report.recall,
            "specificity": report.specificity,
            "precision": report.precision,
            "counts": asdict(report.counts),
        }
        summary = f"MCC={report.mcc:.4f} G-mean={report.gmean:.4f}"
    with open(f"{prefix}_metrics.json", "w", encoding="utf-8") as handle:
        json.dump(payload, handle, indent=2, sort_keys=True)
        handle.write("\n")
    if args.trace:
        write_trace(result.state.mae_history, args.trace)
    print(
        f"{summary} iterations={result.iterations_used} "
        f"converged={str(result.converged).lower()}"
    )
    return EXIT_OK


def cmd_experiment(args) -> int:
    if bool(args.input) == bool(args.synthetic_spec):
        raise ValueError("give exactly one of --input or --synthetic-spec")
    if args.input:
        dataset = _read_network(args.input)
        dataset_desc = {"input": args.input, "digest": dataset_digest(dataset)}
    else:
        spec_text = args.synthetic_spec
        if not spec_text.lstrip().startswith("{"):
            spec_text = Path(spec_text).read_text(encoding="utf-8")
        raw = json.loads(spec_text)
        dataset = SyntheticSpec(
            node_count=int(raw["node_count"]),
            layer_count=int(raw["layer_count"]),
            degree_law=parse_degree_law(raw["degree_law"]),
            overlap=float(raw.get("overlap", 0.0)),
            seed=int(raw.get("seed", 0)),
        )
        dataset_desc = {
            "synthetic": {**raw, "degree_law": dataset.degree_law.describe()},
            "digest": dataset_digest(generate_multiplex(dataset)),
        }
    methods = tuple(m.strip() for m in args.methods.split(",") if m.strip())
    cfg = ExperimentConfig(
        dataset=dataset,
        coverage_grid=_parse_coverages(args.coverages),
        repetitions=args.reps,
        methods=methods,
        solver=_solver_config(args, method="ema"),
        base_seed=args.seed,
        sharing_mode=args.sharing,
        parallelism=args.workers,
    )
    records = run_experiment(cfg)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    write_results(records, out_dir / "runs.csv")
    write_summary(summarize(records), out_dir / "summary.csv")
    write_manifest(
        {
            "created_at": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
            "dataset": dataset_desc,
            "coverages": list(cfg.coverage_grid),
            "repetitions": cfg.repetitions,
            "methods": list(methods),
            "base_seed": cfg.base_seed,
            "sharing_mode": cfg.sharing_mode,
            "solver": asdict(cfg.solver),
            "workers": cfg.parallelism,
        },
        out_dir / "manifest.json",
    )
    print(f"wrote {len(records)} run records to {out_dir}")
    return EXIT_OK


def cmd_generate(args) -> int:
    spec = SyntheticSpec(
        node_count=args.nodes,
        layer_count=args.layers,
        degree_law=parse_degree_law(args.degree_law),
        overlap=args.overlap,
        seed=args.seed,
    )
    net = generate_multiplex(spec)
    if args.out == "-":
        serialize_multiplex(net, sys.stdout)
    else:
        with open(args.out, "w", encoding="utf-8") as handle:
            serialize_multiplex(net, handle)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="plexrecon",
        description="Reconstruct sparse multiplex networks from partial observations.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    fmt = argparse.ArgumentDefaultsHelpFormatter

    p_stats = sub.add_parser(
        "stats", formatter_class=fmt, help="per-layer statistics of an edge list"
    )
    p_stats.add_argument("input", help="multiplex edge list path, or - for stdin")
    p_stats.set_defaults(func=cmd_stats)

    p_rec = sub.add_parser(
        "reconstruct", formatter_class=fmt,
        help="mask a network and reconstruct it with one method",
    )
    p_rec.add_argument("--input", required=True, help="edge list path, or - for stdin")
    p_rec.add_argument("--coverage", type=float, required=True,
                       help="fraction of observed nodes per layer")
    p_rec.add_argument("--method", choices=("ema", "em", "rm"), default="ema",
                       help="reconstruction method")
    p_rec.add_argument("--seed", type=int, default=0, help="base random seed")
    p_rec.add_argument("--tol", type=float, default=1e-5,
                       help="convergence tolerance on the mean absolute change")
    p_rec.add_argument("--max-iters", type=int, default=200,
                       help="iteration cap")
    p_rec.add_argument("--sharing", choices=("shared", "per_layer"),
                       default="per_layer", help="observed-node sharing across layers")
    p_rec.add_argument("--binarize", choices=("threshold", "top_k"),
                       default="threshold")
    p_rec.add_argument("--out-prefix", default="recon",
                       help="prefix for predicted edge lists and metrics JSON")
    p_rec.add_argument("--trace", default=None,
                       help="optional path for a per-iteration convergence CSV")
    p_rec.set_defaults(func=cmd_reconstruct)

    p_exp = sub.add_parser(
        "experiment", formatter_class=fmt,
        help="coverage sweep with repeated masks and method comparison",
    )
    p_exp.add_argument("--input", default=None, help="edge list path, or - for stdin")
    p_exp.add_argument("--synthetic-spec", default=None,
                       help="JSON (inline or file path) describing a synthetic multiplex")
    p_exp.add_argument("--coverages", default="0.1:0.9:0.1",
                       help="comma list or start:stop:step grid")
    p_exp.add_argument("--reps", type=int, default=50,
                       help="repetitions per coverage")
    p_exp.add_argument("--methods", default="ema,em,rm",
                       help="comma list of methods to compare")
    p_exp.add_argument("--seed", type=int, default=0, help="base random seed")
    p_exp.add_argument("--tol", type=float, default=1e-5,
                       help="convergence tolerance")
    p_exp.add_argument("--max-iters", type=int, default=200,
                       help="iteration cap")
    p_exp.add_argument("--binarize", choices=("threshold", "top_k"), default="top_k")
    p_exp.add_argument("--sharing", choices=("shared", "per_layer"),
                       default="per_layer")
    p_exp.add_argument("--workers", type=int, default=1,
                       help="parallel worker processes")
    p_exp.add_argument("--out", required=True, help="output directory")
    p_exp.set_defaults(func=cmd_experiment)

    p_gen = sub.add_parser(
        "generate", formatter_class=fmt, help="write a synthetic multiplex edge list"
    )
    p_gen.add_argument("--nodes", type=int, required=True,
                       help="size of the shared node universe")
    p_gen.add_argument("--layers", type=int, required=True,
                       help="number of layers")
    p_gen.add_argument("--degree-law", default="poisson:3",
                       help="poisson:MEAN or powerlaw:EXPONENT[:MIN_DEGREE]")
    p_gen.add_argument("--overlap", type=float, default=0.0,
                       help="probability of copying each layer-1 edge into later layers")
    p_gen.add_argument("--seed", type=int, default=0, help="random seed")
    p_gen.add_argument("--out", default="-", help="output path, or - for stdout")
    p_gen.set_defaults(func=cmd_generate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except SolverError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except (ParseError, CoverageError, GenerationError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
