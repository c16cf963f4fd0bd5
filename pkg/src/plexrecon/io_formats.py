"""Edge-list ingestion and delimited result output.

Input format: whitespace-separated records ``layer node node [weight]``, one
per line; lines starting with ``#`` and blank lines are ignored.  The model
is unweighted, so weights other than 1 are tolerated with a warning and
binarized.  Node tokens map to dense 0-based indices in first-appearance
order; layers keep their first-appearance order.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import warnings
from typing import IO, Iterable

import numpy as np

from .core import LayerGraph, MultiplexNetwork, validate
from .errors import EmptyNetworkError, ParseError

__all__ = [
    "dataset_digest",
    "load_multiplex",
    "parse_multiplex",
    "serialize_multiplex",
    "write_manifest",
    "write_results",
    "write_summary",
    "write_trace",
]

RESULTS_HEADER = [
    "method", "coverage", "rep", "seed", "layers",
    "mcc", "gmean", "tp", "tn", "fp", "fn", "iterations", "converged",
]
SUMMARY_HEADER = [
    "method", "coverage", "runs", "mcc_mean", "mcc_std", "gmean_mean", "gmean_std",
]


def _fmt(x: float) -> str:
    """Floats at 6 significant digits."""
    return format(float(x), ".6g")


def parse_multiplex(
    lines: Iterable[str], node_order: Iterable[str] | None = None
) -> MultiplexNetwork:
    """Parse an edge-list stream into a multiplex network.

    ``node_order``, when given, fixes the label-to-index mapping (and hence
    the node universe, allowing isolated nodes); otherwise labels are indexed
    in first-appearance order.  Self-loops are dropped with a warning,
    duplicate and reciprocal records collapse silently.
    """
    node_index: dict[str, int] = {}
    fixed_universe = node_order is not None
    if fixed_universe:
        for label in node_order:
            if label in node_index:
                raise ParseError(f"node_order repeats label {label!r}")
            node_index[label] = len(node_index)
    layer_index: dict[str, int] = {}
    layer_edges: list[set[tuple[int, int]]] = []

    def index_of(token: str, lineno: int) -> int:
        if token not in node_index:
            if fixed_universe:
                raise ParseError(f"line {lineno}: node {token!r} not in node_order")
            node_index[token] = len(node_index)
        return node_index[token]

    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) not in (3, 4):
            raise ParseError(
                f"line {lineno}: expected 'layer node node [weight]', got {len(parts)} fields"
            )
        layer_tok, a_tok, b_tok = parts[0], parts[1], parts[2]
        if len(parts) == 4:
            try:
                weight = float(parts[3])
            except ValueError:
                raise ParseError(f"line {lineno}: bad weight {parts[3]!r}") from None
            if weight != 1.0:
                warnings.warn(
                    f"line {lineno}: weight {weight:g} ignored (model is unweighted)",
                    stacklevel=2,
                )
        if layer_tok not in layer_index:
            layer_index[layer_tok] = len(layer_index)
            layer_edges.append(set())
        a = index_of(a_tok, lineno)
        b = index_of(b_tok, lineno)
        if a == b:
            warnings.warn(f"line {lineno}: self-loop at {a_tok!r} dropped", stacklevel=2)
            continue
        layer_edges[layer_index[layer_tok]].add((min(a, b), max(a, b)))

    if sum(len(edges) for edges in layer_edges) == 0:
        raise EmptyNetworkError("input contains no edges")
    n = len(node_index)
    layers = []
    for edges in layer_edges:
        adj = np.zeros((n, n), dtype=np.uint8)
        for i, j in edges:
            adj[i, j] = 1
            adj[j, i] = 1
        layers.append(LayerGraph(adj))
    labels = tuple(sorted(node_index, key=node_index.get))
    layer_labels = tuple(sorted(layer_index, key=layer_index.get))
    net = MultiplexNetwork(
        node_count=n,
        layers=tuple(layers),
        node_labels=labels,
        layer_labels=layer_labels,
    )
    report = validate(net)
    if report.errors:
        raise ParseError(f"parsed network is structurally invalid: {report.errors[0]}")
    return net


def load_multiplex(path) -> MultiplexNetwork:
    """Parse a multiplex edge list from a file path."""
    with open(path, "r", encoding="utf-8") as handle:
        return parse_multiplex(handle)


def serialize_multiplex(net: MultiplexNetwork, stream: IO[str] | None = None) -> str:
    """Write the network back out as an edge list (layer, i<j ascending).

    Round trip: parsing the output with ``node_order=net.node_labels``
    reproduces the adjacency matrices exactly.
    """
    out = stream if stream is not None else io.StringIO()
    labels = net.node_labels or tuple(str(i) for i in range(net.node_count))
    layer_labels = net.layer_labels or tuple(
        str(k + 1) for k in range(net.layer_count)
    )
    for k, layer in enumerate(net.layers):
        iu, ju = np.nonzero(np.triu(layer.adjacency, k=1))
        for i, j in zip(iu.tolist(), ju.tolist()):
            out.write(f"{layer_labels[k]} {labels[i]} {labels[j]}\n")
    if stream is None:
        return out.getvalue()
    return ""


def dataset_digest(net: MultiplexNetwork) -> str:
    """SHA-256 of the canonical edge-list serialization."""
    return hashlib.sha256(serialize_multiplex(net).encode("utf-8")).hexdigest()


def _open_dest(destination, newline=""):
    if hasattr(destination, "write"):
        return destination, False
    return open(destination, "w", encoding="utf-8", newline=newline), True


def write_results(records, destination) -> None:
    """Write one CSV row per run, ordered by (method, coverage, rep).

    ``records`` is an iterable of harness RunRecord objects.
    """
    handle, owned = _open_dest(destination)
    try:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(RESULTS_HEADER)
        ordered = sorted(records, key=lambda r: (r.method, r.coverage, r.rep))
        for rec in ordered:
            counts = rec.metrics.counts
            writer.writerow([
                rec.method,
                _fmt(rec.coverage),
                rec.rep,
                rec.seed,
                rec.layers,
                _fmt(rec.metrics.mcc),
                _fmt(rec.metrics.gmean),
                counts.tp, counts.tn, counts.fp, counts.fn,
                rec.iterations,
                "true" if rec.converged else "false",
            ])
    except OSError as exc:
        raise OSError(f"cannot write results to {destination}: {exc}") from exc
    finally:
        if owned:
            handle.close()


def write_summary(rows, destination) -> None:
    """Write per-(method, coverage) mean/std summary rows."""
    handle, owned = _open_dest(destination)
    try:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(SUMMARY_HEADER)
        for row in rows:
            writer.writerow([
                row.method,
                _fmt(row.coverage),
                row.runs,
                _fmt(row.mcc_mean),
                _fmt(row.mcc_std),
                _fmt(row.gmean_mean),
                _fmt(row.gmean_std),
            ])
    finally:
        if owned:
            handle.close()


def write_trace(mae_history, destination) -> None:
    """Write per-iteration convergence errors as ``iteration,mae`` rows."""
    handle, owned = _open_dest(destination)
    try:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(["iteration", "mae"])
        for it, mae in enumerate(mae_history, start=1):
            writer.writerow([it, _fmt(mae)])
    except OSError as exc:
        raise OSError(f"cannot write trace to {destination}: {exc}") from exc
    finally:
        if owned:
            handle.close()


def write_manifest(payload: dict, destination) -> None:
    """Write a JSON provenance manifest (config echo, dataset digest, timestamp)."""
    handle, owned = _open_dest(destination, newline=None)
    try:
        json.dump(payload, handle, indent=2, sort_keys=True)
        handle.write("\n")
    finally:
        if owned:
            handle.close()
