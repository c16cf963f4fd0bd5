"""Partial observability: sample observed node sets and project the truth.

An entry (i, j) of a layer is observed iff both endpoints belong to that
layer's observed node set; hiding a node hides every link incident to it.
Observation is noiseless: defined entries equal the ground truth.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass

import numpy as np

from .core import MultiplexNetwork
from .errors import CoverageError

__all__ = ["ObservationMask", "ObservedMultiplex", "apply_mask", "sample_mask"]

SHARING_MODES = ("shared", "per_layer")


@dataclass(frozen=True, eq=False)
class ObservationMask:
    """Per-layer observed node sets at a common coverage fraction."""

    observed_nodes: tuple[np.ndarray, ...]
    coverage: float
    sharing_mode: str
    node_count: int

    def __post_init__(self):
        if self.sharing_mode not in SHARING_MODES:
            raise ValueError(f"sharing_mode must be one of {SHARING_MODES}")
        frozen = []
        for nodes in self.observed_nodes:
            arr = np.asarray(np.sort(np.asarray(nodes, dtype=np.int64)))
            arr.flags.writeable = False
            frozen.append(arr)
        object.__setattr__(self, "observed_nodes", tuple(frozen))

    @property
    def layer_count(self) -> int:
        return len(self.observed_nodes)

    def entry_mask(self, layer: int) -> np.ndarray:
        """Boolean (n, n) matrix, True where the entry is observed (diagonal False)."""
        flags = np.zeros(self.node_count, dtype=bool)
        flags[self.observed_nodes[layer]] = True
        mask = np.outer(flags, flags)
        np.fill_diagonal(mask, False)
        return mask

    def digest(self) -> str:
        """Stable hash of the observed node sets, for pairing checks."""
        h = hashlib.sha256()
        h.update(str(self.node_count).encode())
        for nodes in self.observed_nodes:
            h.update(b"|")
            h.update(nodes.tobytes())
        return h.hexdigest()


@dataclass(frozen=True, eq=False)
class ObservedMultiplex:
    """The ground truth seen through a mask.

    ``values[l][i, j]`` equals the true entry wherever ``defined[l][i, j]``
    is True; everywhere else the entry is unobserved (which is not the same
    as zero).
    """

    mask: ObservationMask
    values: np.ndarray   # (layers, n, n) uint8, meaningful only where defined
    defined: np.ndarray  # (layers, n, n) bool

    def __post_init__(self):
        values = np.asarray(self.values)
        defined = np.asarray(self.defined)
        if values.shape != defined.shape or values.ndim != 3:
            raise ValueError("values and defined must share one (layers, n, n) shape")
        values.flags.writeable = False
        defined.flags.writeable = False
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "defined", defined)

    @property
    def layer_count(self) -> int:
        return self.values.shape[0]

    @property
    def node_count(self) -> int:
        return self.values.shape[1]

    def unobserved(self, layer: int) -> np.ndarray:
        """Boolean (n, n) matrix of unobserved off-diagonal entries."""
        out = ~self.defined[layer]
        np.fill_diagonal(out, False)
        return out.copy()

    def observed_edge_count(self, layer: int) -> int:
        """Number of observed true links (unordered) in the layer."""
        visible = np.triu(self.defined[layer] & (self.values[layer] == 1), k=1)
        return int(visible.sum())


def _round_half_up(x: float) -> int:
    return int(math.floor(x + 0.5))


def sample_mask(
    node_count: int,
    layer_count: int,
    coverage: float,
    sharing_mode: str = "per_layer",
    seed: int = 0,
) -> ObservationMask:
    """Sample uniformly random observed node sets of size round(c * n).

    In ``shared`` mode all layers observe the same set; in ``per_layer`` mode
    the sets are drawn independently.  Deterministic given the seed.
    """
    if not 0.0 < coverage <= 1.0:
        raise CoverageError(f"coverage must lie in (0, 1], got {coverage}")
    size = _round_half_up(coverage * node_count)
    if size < 1:
        raise CoverageError(
            f"coverage {coverage} rounds to an empty observed set for n={node_count}"
        )
    rng = np.random.default_rng(seed)
    if sharing_mode == "shared":
        chosen = rng.choice(node_count, size=size, replace=False)
        sets = tuple(chosen.copy() for _ in range(layer_count))
    elif sharing_mode == "per_layer":
        sets = tuple(
            rng.choice(node_count, size=size, replace=False)
            for _ in range(layer_count)
        )
    else:
        raise ValueError(f"sharing_mode must be one of {SHARING_MODES}")
    return ObservationMask(
        observed_nodes=sets,
        coverage=coverage,
        sharing_mode=sharing_mode,
        node_count=node_count,
    )


def apply_mask(net: MultiplexNetwork, mask: ObservationMask) -> ObservedMultiplex:
    """Project the ground truth onto the mask's observed entries."""
    if mask.node_count != net.node_count:
        raise ValueError(
            f"mask is over {mask.node_count} nodes, network has {net.node_count}"
        )
    if mask.layer_count != net.layer_count:
        raise ValueError(
            f"mask has {mask.layer_count} layers, network has {net.layer_count}"
        )
    n = net.node_count
    m = net.layer_count
    values = np.zeros((m, n, n), dtype=np.uint8)
    defined = np.zeros((m, n, n), dtype=bool)
    for k, layer in enumerate(net.layers):
        entry = mask.entry_mask(k)
        defined[k] = entry
        values[k][entry] = layer.adjacency[entry]
    return ObservedMultiplex(mask=mask, values=values, defined=defined)
