"""Configuration-model link probabilities and synthetic multiplex generation.

The pair probability is the clipped configuration-model form
min(1, d_i * d_j / (2|E| - 1)); layers are drawn with independent Bernoulli
trials per unordered pair (Chung-Lu style), so the generator and the
reconstruction engine share one probabilistic model.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .core import LayerGraph, MultiplexNetwork
from .errors import GenerationError

__all__ = [
    "PoissonLaw",
    "PowerLawLaw",
    "SyntheticSpec",
    "generate_multiplex",
    "link_probability",
    "parse_degree_law",
    "sample_layer",
]


@dataclass(frozen=True)
class PoissonLaw:
    """Poisson degree law with the given mean."""

    mean: float

    def __post_init__(self):
        if self.mean < 0:
            raise ValueError("poisson mean must be nonnegative")

    def sample(self, rng: np.random.Generator, n: int) -> np.ndarray:
        return rng.poisson(self.mean, size=n).astype(float)

    def describe(self) -> str:
        return f"poisson:{self.mean:g}"


@dataclass(frozen=True)
class PowerLawLaw:
    """Continuous power-law degree law, P(d) ~ d^-exponent for d >= min_degree."""

    exponent: float
    min_degree: float = 1.0

    def __post_init__(self):
        if self.exponent <= 1.0:
            raise ValueError("power-law exponent must exceed 1")
        if self.min_degree <= 0:
            raise ValueError("min_degree must be positive")

    def sample(self, rng: np.random.Generator, n: int) -> np.ndarray:
        u = rng.random(n)
        degrees = self.min_degree * u ** (-1.0 / (self.exponent - 1.0))
        # cap so no node can demand more partners than exist
        return np.minimum(degrees, float(n - 1))

    def describe(self) -> str:
        return f"powerlaw:{self.exponent:g}:{self.min_degree:g}"


def parse_degree_law(text: str) -> PoissonLaw | PowerLawLaw:
    """Parse "poisson:MEAN" or "powerlaw:EXPONENT[:MIN_DEGREE]"."""
    parts = text.split(":")
    kind = parts[0].strip().lower()
    try:
        if kind == "poisson" and len(parts) == 2:
            return PoissonLaw(mean=float(parts[1]))
        if kind == "powerlaw" and len(parts) in (2, 3):
            min_degree = float(parts[2]) if len(parts) == 3 else 1.0
            return PowerLawLaw(exponent=float(parts[1]), min_degree=min_degree)
    except ValueError as exc:
        raise ValueError(f"bad degree law {text!r}: {exc}") from None
    raise ValueError(f"bad degree law {text!r} (want poisson:M or powerlaw:G[:K])")


@dataclass(frozen=True)
class SyntheticSpec:
    """Recipe for a synthetic multiplex.

    Layer 1 is drawn from the degree law.  Every subsequent layer copies each
    layer-1 edge independently with probability ``overlap``, then fills with
    configuration-model edges from a fresh degree sequence until the fresh
    sequence's own target edge count is reached.  ``overlap`` therefore
    controls the interlayer dependency the aggregation step can exploit.
    """

    node_count: int
    layer_count: int
    degree_law: PoissonLaw | PowerLawLaw
    overlap: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.node_count < 2:
            raise ValueError("node_count must be at least 2")
        if self.layer_count < 1:
            raise ValueError("layer_count must be at least 1")
        if not 0.0 <= self.overlap <= 1.0:
            raise ValueError("overlap must lie in [0, 1]")


def link_probability(d_i: float, d_j: float, edge_count: float) -> float:
    """Clipped configuration-model probability of a link between two nodes.

    Returns min(1, d_i * d_j / (2 * edge_count - 1)).  The denominator must
    be positive, i.e. edge_count > 1/2.
    """
    if d_i < 0 or d_j < 0:
        raise ValueError("degrees must be nonnegative")
    denom = 2.0 * edge_count - 1.0
    if denom <= 0:
        raise ValueError(f"edge count {edge_count} gives nonpositive denominator")
    return min(1.0, d_i * d_j / denom)


def _pair_probabilities(degrees: np.ndarray) -> np.ndarray:
    """Symmetric matrix of clipped pair probabilities for a degree sequence."""
    denom = degrees.sum() - 1.0
    probs = np.minimum(1.0, np.outer(degrees, degrees) / denom)
    np.fill_diagonal(probs, 0.0)
    return probs


def _bernoulli_layer(rng: np.random.Generator, degrees: np.ndarray) -> np.ndarray:
    n = degrees.shape[0]
    adj = np.zeros((n, n), dtype=np.uint8)
    if degrees.sum() <= 0:
        return adj
    if degrees.sum() <= 1.0:
        raise ValueError("degree sequence sums to <= 1; pair probability undefined")
    probs = _pair_probabilities(degrees)
    draws = rng.random((n, n))
    upper = np.triu(draws < probs, k=1)
    return (upper | upper.T).astype(np.uint8)


def sample_layer(degrees, seed: int) -> LayerGraph:
    """Draw one layer: each unordered pair linked independently with the
    configuration-model probability implied by ``degrees``.

    An all-zero degree sequence yields an empty layer.  A degree exceeding
    the implied edge count triggers a hub-condition warning.
    """
    degrees = np.asarray(degrees, dtype=float)
    if degrees.ndim != 1 or degrees.shape[0] < 2:
        raise ValueError("need a 1-d degree sequence of length >= 2")
    if np.any(degrees < 0):
        raise ValueError("degrees must be nonnegative")
    edge_count = degrees.sum() / 2.0
    if np.any(degrees > edge_count) and edge_count > 0:
        warnings.warn(
            "degree sequence has a giant hub (degree exceeds edge count); "
            "clipping will distort realized degrees",
            stacklevel=2,
        )
    rng = np.random.default_rng(seed)
    return LayerGraph(_bernoulli_layer(rng, degrees))


def _fill_to_target(
    rng: np.random.Generator, adj: np.ndarray, degrees: np.ndarray, target: int
) -> np.ndarray:
    """Add configuration-model edges until the layer holds ``target`` edges."""
    n = adj.shape[0]
    have = int(np.triu(adj, k=1).sum())
    need = target - have
    if need <= 0:
        return adj
    weights = _pair_probabilities(degrees)
    iu, ju = np.triu_indices(n, k=1)
    free = adj[iu, ju] == 0
    w = weights[iu, ju] * free
    candidates = np.flatnonzero(w > 0)
    if candidates.size < need:
        raise GenerationError(
            f"cannot reach {target} edges: only {candidates.size} candidate "
            f"pairs with positive probability remain"
        )
    p = w[candidates] / w[candidates].sum()
    chosen = rng.choice(candidates, size=need, replace=False, p=p)
    adj = adj.copy()
    adj[iu[chosen], ju[chosen]] = 1
    adj[ju[chosen], iu[chosen]] = 1
    return adj


def generate_multiplex(spec: SyntheticSpec) -> MultiplexNetwork:
    """Generate a synthetic multiplex per ``spec``; deterministic given its seed."""
    rng = np.random.default_rng(spec.seed)
    n = spec.node_count
    first_degrees = spec.degree_law.sample(rng, n)
    adjacencies = [_bernoulli_layer(rng, first_degrees)]
    base_iu, base_ju = np.nonzero(np.triu(adjacencies[0], k=1))
    for _ in range(1, spec.layer_count):
        degrees = spec.degree_law.sample(rng, n)
        target = int(round(degrees.sum() / 2.0))
        adj = np.zeros((n, n), dtype=np.uint8)
        if base_iu.size:
            keep = rng.random(base_iu.size) < spec.overlap
            adj[base_iu[keep], base_ju[keep]] = 1
            adj[base_ju[keep], base_iu[keep]] = 1
        if degrees.sum() > 1.0:
            adj = _fill_to_target(rng, adj, degrees, target)
        elif target > 0:
            raise GenerationError("fresh degree sequence cannot support any edge")
        adjacencies.append(adj)
    return MultiplexNetwork(
        node_count=n, layers=tuple(LayerGraph(a) for a in adjacencies)
    )
