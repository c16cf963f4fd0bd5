import numpy as np
import pytest

from plexrecon.core import LayerGraph, MultiplexNetwork


def adjacency_from_pairs(n, pairs):
    adj = np.zeros((n, n), dtype=np.uint8)
    for i, j in pairs:
        adj[i, j] = 1
        adj[j, i] = 1
    return adj


def make_net(n, layers_pairs, node_labels=None, layer_labels=None):
    layers = tuple(LayerGraph(adjacency_from_pairs(n, pairs)) for pairs in layers_pairs)
    return MultiplexNetwork(
        node_count=n, layers=layers, node_labels=node_labels, layer_labels=layer_labels
    )


def random_net(rng, n=None, m=None, p=0.3):
    """Small random multiplex for fuzz tests."""
    n = n or int(rng.integers(2, 9))
    m = m or int(rng.integers(1, 5))
    layers = []
    for _ in range(m):
        draw = rng.random((n, n)) < p
        upper = np.triu(draw, k=1)
        layers.append(LayerGraph((upper | upper.T).astype(np.uint8)))
    return MultiplexNetwork(node_count=n, layers=tuple(layers))


@pytest.fixture
def rng():
    return np.random.default_rng(20240612)
