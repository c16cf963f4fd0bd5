"""Domain types for multiplex networks, OR aggregation, validation, layer statistics.

A multiplex network is a set of layers sharing one node universe; each layer
is an undirected, unweighted graph stored as a symmetric binary adjacency
matrix with a zero diagonal.  All math works on dense 0-based node indices;
labels, when present, are only for input/output.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import EmptyLayerError

__all__ = [
    "LayerGraph",
    "LayerStats",
    "MultiplexNetwork",
    "ValidationReport",
    "aggregate_or",
    "component_sizes",
    "layer_stats",
    "validate",
]


def _freeze(arr: np.ndarray) -> np.ndarray:
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True, eq=False)
class LayerGraph:
    """One layer of a multiplex network.

    The adjacency matrix is stored as given; use :func:`validate` to check
    symmetry, binarity and the zero diagonal.  Instances are immutable after
    construction and safe to share between threads.
    """

    adjacency: np.ndarray

    def __post_init__(self):
        adj = np.asarray(self.adjacency)
        if adj.ndim != 2 or adj.shape[0] != adj.shape[1]:
            raise ValueError(f"adjacency must be square, got shape {adj.shape}")
        object.__setattr__(self, "adjacency", _freeze(adj))

    @property
    def node_count(self) -> int:
        return self.adjacency.shape[0]

    @property
    def edge_count(self) -> int:
        """Number of unordered linked pairs (half the matrix sum)."""
        return int(round(float(self.adjacency.sum()) / 2.0))

    @property
    def degrees(self) -> np.ndarray:
        return np.asarray(self.adjacency.sum(axis=1))


@dataclass(frozen=True, eq=False)
class MultiplexNetwork:
    """Ground-truth multiplex: one adjacency per layer over a shared universe.

    Parameters
    ----------
    node_count: size of the shared node universe.
    layers: per-layer graphs, every adjacency node_count x node_count.
    node_labels: optional external labels, one per node.
    layer_labels: optional external layer names, one per layer.
    """

    node_count: int
    layers: tuple[LayerGraph, ...]
    node_labels: tuple[str, ...] | None = None
    layer_labels: tuple[str, ...] | None = None

    def __post_init__(self):
        if self.node_count < 1:
            raise ValueError("node_count must be positive")
        layers = tuple(self.layers)
        if not layers:
            raise ValueError("a multiplex needs at least one layer")
        for k, layer in enumerate(layers):
            if layer.node_count != self.node_count:
                raise ValueError(
                    f"layer {k} is {layer.node_count}x{layer.node_count}, "
                    f"expected {self.node_count}"
                )
        if self.node_labels is not None and len(self.node_labels) != self.node_count:
            raise ValueError("node_labels length does not match node_count")
        if self.layer_labels is not None and len(self.layer_labels) != len(layers):
            raise ValueError("layer_labels length does not match layer count")
        object.__setattr__(self, "layers", layers)
        if self.node_labels is not None:
            object.__setattr__(self, "node_labels", tuple(self.node_labels))
        if self.layer_labels is not None:
            object.__setattr__(self, "layer_labels", tuple(self.layer_labels))

    @property
    def layer_count(self) -> int:
        return len(self.layers)

    def adjacency_stack(self) -> np.ndarray:
        """All layer adjacencies as one (layers, n, n) float array."""
        return np.stack([layer.adjacency.astype(float) for layer in self.layers])


@dataclass(frozen=True)
class LayerStats:
    """Descriptive statistics of a single layer, over its active nodes only."""

    active_nodes: int
    edges: int
    density: float
    avg_degree: float
    mean_cc_size: float
    gcc_size: int
    cov_cc_size: float


@dataclass(frozen=True)
class ValidationReport:
    """Structural errors and hub-condition warnings for a multiplex."""

    errors: tuple[str, ...] = field(default=())
    warnings: tuple[str, ...] = field(default=())

    @property
    def ok(self) -> bool:
        return not self.errors


def aggregate_or(net: MultiplexNetwork) -> np.ndarray:
    """OR-aggregate all layers: entry is 1 iff any layer links the pair.

    Returns a symmetric binary uint8 matrix with zero diagonal, computed as
    1 - prod_l (1 - Z_l).
    """
    stack = net.adjacency_stack()
    agg = 1.0 - np.prod(1.0 - stack, axis=0)
    return agg.astype(np.uint8)


def validate(net: MultiplexNetwork) -> ValidationReport:
    """Check structural invariants and hub conditions, without raising.

    Errors cover asymmetry, self-loops and non-binary entries.  A warning is
    emitted for every (layer, node) whose degree exceeds the layer's edge
    count, i.e. a node incident to more than half the layer's link endpoints;
    such hubs break the feasibility of the exact degree update.
    """
    errors: list[str] = []
    warnings: list[str] = []
    for k, layer in enumerate(net.layers):
        adj = layer.adjacency
        if not np.array_equal(adj, adj.T):
            i, j = np.argwhere(adj != adj.T)[0]
            errors.append(f"layer {k}: asymmetric entry at ({i}, {j})")
        if np.any(np.diagonal(adj) != 0):
            nodes = np.flatnonzero(np.diagonal(adj) != 0)
            errors.append(f"layer {k}: self-loop at node(s) {nodes.tolist()}")
        if not np.isin(adj, (0, 1)).all():
            errors.append(f"layer {k}: non-binary entries present")
        if not errors:
            edge_count = layer.edge_count
            degrees = layer.degrees
            for i in np.flatnonzero(degrees > edge_count):
                warnings.append(
                    f"layer {k}: node {int(i)} has degree {int(degrees[i])} "
                    f"> edge count {edge_count} (giant hub)"
                )
    return ValidationReport(errors=tuple(errors), warnings=tuple(warnings))


class _DisjointSet:
    """Union-find with path compression, over a fixed index range."""

    def __init__(self, size: int):
        self.parent = list(range(size))

    def find(self, x: int) -> int:
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a: int, b: int) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[rb] = ra


def component_sizes(layer: LayerGraph) -> list[int]:
    """Sizes of connected components over the layer's active nodes.

    Nodes with zero degree are not part of any component.
    """
    adj = layer.adjacency
    dsu = _DisjointSet(layer.node_count)
    rows, cols = np.nonzero(np.triu(adj, k=1))
    for i, j in zip(rows.tolist(), cols.tolist()):
        dsu.union(i, j)
    active = np.flatnonzero(layer.degrees > 0)
    counts: dict[int, int] = {}
    for i in active.tolist():
        root = dsu.find(i)
        counts[root] = counts.get(root, 0) + 1
    return sorted(counts.values(), reverse=True)


def layer_stats(layer: LayerGraph) -> LayerStats:
    """Per-layer statistics over active nodes (degree >= 1).

    Density and average degree use the active-node count; the coefficient of
    variation of component sizes uses the population standard deviation.
    """
    sizes = component_sizes(layer)
    if not sizes:
        raise EmptyLayerError("layer has no active nodes")
    active = int(sum(sizes))
    edges = layer.edge_count
    sizes_arr = np.asarray(sizes, dtype=float)
    mean_cc = float(sizes_arr.mean())
    cov_cc = float(sizes_arr.std() / mean_cc)
    return LayerStats(
        active_nodes=active,
        edges=edges,
        density=2.0 * edges / (active * (active - 1)),
        avg_degree=2.0 * edges / active,
        mean_cc_size=mean_cc,
        gcc_size=int(sizes_arr.max()),
        cov_cc_size=cov_cc,
    )
