"""Iterative reconstruction of multiplex topology from partial observations.

Three methods share one interface:

* ``em``  — alternate a configuration-model expectation step (pair
  probabilities from current degree estimates) with a degree update (row sums
  of the probabilities).  Layers are reconstructed independently.
* ``ema`` — the same loop with an aggregation step between E and M: the
  entrywise OR-aggregate implied by current beliefs (observed 0/1 where
  defined, probabilities elsewhere) is binarized at a threshold, entries the
  cross-layer consensus rejects are suppressed and supported entries are
  renormalized by the aggregate probability.  This couples the layers.
* ``rm``  — uniform random baseline that spends a per-layer link budget on
  unobserved entries.

Every step preserves three invariants: observed entries stay clamped to the
observed adjacency, probability matrices stay symmetric with a zero diagonal,
and all entries stay inside [0, 1].
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import FeasibilityError, SolverError
from .metrics import mae_delta
from .observe import ObservedMultiplex

__all__ = [
    "BeliefState",
    "Reconstruction",
    "SolverConfig",
    "a_step",
    "e_step",
    "initialize",
    "m_step",
    "m_step_exact",
    "random_baseline",
    "run",
]

METHODS = ("ema", "em", "rm")
BINARIZATIONS = ("threshold", "top_k")
EDGE_ESTIMATE_MODES = ("self_consistent", "coverage_scaled")


@dataclass(frozen=True)
class SolverConfig:
    """Knobs of one reconstruction run.

    ``tolerance`` bounds the mean absolute change of unobserved probabilities
    between consecutive iterations; ``aggregate_threshold`` binarizes the
    estimated aggregate in the A-step; ``threshold`` binarizes the final
    probabilities when ``binarization="threshold"``.  ``top_k`` instead sets
    the per-layer link budget's worth of highest-probability unobserved
    entries, which grants the solver the same information as the random
    baseline.  ``edge_estimate_mode`` picks how the unobservable per-layer
    edge count is estimated: re-derived from the degree estimates each M-step
    (``self_consistent``) or fixed at observed count / coverage^2
    (``coverage_scaled``).
    """

    method: str = "ema"
    tolerance: float = 1e-5
    max_iterations: int = 200
    aggregate_threshold: float = 0.5
    binarization: str = "threshold"
    threshold: float = 0.5
    edge_estimate_mode: str = "self_consistent"
    seed: int = 0

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"method must be one of {METHODS}")
        if self.tolerance <= 0:
            raise ValueError("tolerance must be positive")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be at least 1")
        if not 0.0 < self.aggregate_threshold < 1.0:
            raise ValueError("aggregate_threshold must lie in (0, 1)")
        if self.binarization not in BINARIZATIONS:
            raise ValueError(f"binarization must be one of {BINARIZATIONS}")
        if self.edge_estimate_mode not in EDGE_ESTIMATE_MODES:
            raise ValueError(f"edge_estimate_mode must be one of {EDGE_ESTIMATE_MODES}")


@dataclass(eq=False)
class BeliefState:
    """Current beliefs: link probabilities, degree and edge-count estimates.

    ``prob`` is a (layers, n, n) stack of symmetric matrices in [0, 1] with
    zero diagonals; observed entries always equal the observed adjacency.
    """

    prob: np.ndarray
    degrees: np.ndarray
    edge_estimates: np.ndarray
    iteration: int = 0
    mae_history: list[float] = field(default_factory=list)

    def _evolve(self, **changes) -> "BeliefState":
        fields = dict(
            prob=self.prob,
            degrees=self.degrees.copy(),
            edge_estimates=self.edge_estimates.copy(),
            iteration=self.iteration,
            mae_history=list(self.mae_history),
        )
        fields.update(changes)
        return BeliefState(**fields)


@dataclass(eq=False)
class Reconstruction:
    """Final solver output: probabilities plus binary predictions."""

    state: BeliefState
    predicted: np.ndarray  # (layers, n, n) uint8
    converged: bool
    iterations_used: int

    @property
    def prob(self) -> np.ndarray:
        return self.state.prob


def _clamp_observed(prob: np.ndarray, obs: ObservedMultiplex) -> np.ndarray:
    return np.where(obs.defined, obs.values.astype(float), prob)


def initialize(obs: ObservedMultiplex, cfg: SolverConfig) -> BeliefState:
    """Random starting point, deterministic given the config seed.

    Degree profiles are drawn uniformly from U(1, n) and then rescaled per
    layer so the implied edge count matches the observation-anchored estimate
    (observed link count / coverage^2).  The rescaling matters: an unscaled
    U(1, n) draw implies ~n^2/8 links, which drives every pair probability
    into the min(1, .) clip at low coverage and strands the solver in an
    all-ones basin it cannot leave.  Unobserved probabilities start at
    symmetric U(0, 1); observed entries are clamped to the observed values.
    """
    rng = np.random.default_rng(cfg.seed)
    m, n = obs.layer_count, obs.node_count
    coverages = np.array(
        [len(nodes) / n for nodes in obs.mask.observed_nodes], dtype=float
    )
    observed_edges = np.array(
        [obs.observed_edge_count(k) for k in range(m)], dtype=float
    )
    with np.errstate(divide="ignore", invalid="ignore"):
        scaled = observed_edges / coverages**2
    scaled = np.where(coverages > 0.0, scaled, 0.0)
    anchors = np.maximum(scaled, 1.0)
    raw = rng.uniform(1.0, float(n), size=(m, n))
    degrees = raw * (2.0 * anchors / raw.sum(axis=1))[:, None]
    prob = np.empty((m, n, n))
    for k in range(m):
        draw = rng.uniform(size=(n, n))
        upper = np.triu(draw, k=1)
        prob[k] = upper + upper.T
    prob = _clamp_observed(prob, obs)
    for k in range(m):
        np.fill_diagonal(prob[k], 0.0)
    if cfg.edge_estimate_mode == "self_consistent":
        edge_estimates = degrees.sum(axis=1) / 2.0
    else:
        edge_estimates = scaled
    return BeliefState(prob=prob, degrees=degrees, edge_estimates=edge_estimates)


def e_step(state: BeliefState, obs: ObservedMultiplex) -> BeliefState:
    """Reset unobserved entries to the clipped configuration-model probability
    d_i * d_j / (2 * edge_estimate - 1); observed entries are untouched."""
    prob = np.empty_like(state.prob)
    for k in range(obs.layer_count):
        est = float(state.edge_estimates[k])
        if 2.0 * est - 1.0 <= 0.0:
            raise SolverError(
                f"layer {k}: edge estimate {est:.6g} <= 1/2 makes the "
                "configuration-model denominator nonpositive"
            )
        d = state.degrees[k]
        prob[k] = np.minimum(1.0, np.outer(d, d) / (2.0 * est - 1.0))
        np.fill_diagonal(prob[k], 0.0)
    prob = _clamp_observed(prob, obs)
    return state._evolve(prob=prob)


def a_step(state: BeliefState, obs: ObservedMultiplex, tau: float = 0.5) -> BeliefState:
    """Cross-layer update via the estimated aggregate topology.

    The aggregate probability a = 1 - prod_l(1 - p_l) is computed from the
    current beliefs (observed entries already carry their 0/1 values).  Where
    a reaches ``tau`` the consensus supports a link and each unobserved entry
    is renormalized to p / a; elsewhere the consensus rejects the link and
    unobserved entries drop to 0.  Since a >= p entrywise the result stays in
    [0, 1].  Observed entries are never modified.
    """
    if obs.layer_count < 2:
        raise SolverError("the aggregation step needs at least 2 layers")
    prob = state.prob
    agg = 1.0 - np.prod(1.0 - prob, axis=0)
    supported = agg >= tau
    with np.errstate(divide="ignore", invalid="ignore"):
        renorm = np.where(agg > 0.0, prob / np.where(agg > 0.0, agg, 1.0), 0.0)
    updated = np.clip(np.where(supported, renorm, 0.0), 0.0, 1.0)
    new_prob = np.where(obs.defined, prob, updated)
    for k in range(obs.layer_count):
        np.fill_diagonal(new_prob[k], 0.0)
    return state._evolve(prob=new_prob)


def m_step(state: BeliefState, mode: str = "self_consistent") -> BeliefState:
    """Degree update: row sums of the probability stack.  In self-consistent
    mode the edge estimate becomes half the degree sum."""
    degrees = state.prob.sum(axis=2)
    if mode == "self_consistent":
        edge_estimates = degrees.sum(axis=1) / 2.0
    else:
        edge_estimates = state.edge_estimates.copy()
    return state._evolve(
        prob=state.prob.copy(), degrees=degrees, edge_estimates=edge_estimates
    )


def m_step_exact(state: BeliefState, mode: str = "self_consistent") -> BeliefState:
    """Non-approximate degree update: the smaller root
    d_i = E - sqrt(E^2 - 2*E*S_i + S_i) with S_i the probability row sum.
    (The larger root exceeds the layer's link count and is discarded.)

    Raises FeasibilityError when the discriminant goes negative, which is the
    giant-hub regime where no real-valued degree solves the stationarity
    condition.
    """
    S = state.prob.sum(axis=2)
    E = state.edge_estimates[:, None]
    disc = E**2 - 2.0 * E * S + S
    if np.any(disc < 0.0):
        k, i = np.argwhere(disc < 0.0)[0]
        raise FeasibilityError(
            f"layer {k}, node {i}: negative discriminant in the exact degree "
            "update; the layer has a giant hub incident to too large a share "
            "of its edges"
        )
    degrees = E - np.sqrt(disc)
    if mode == "self_consistent":
        edge_estimates = degrees.sum(axis=1) / 2.0
    else:
        edge_estimates = state.edge_estimates.copy()
    return state._evolve(
        prob=state.prob.copy(), degrees=degrees, edge_estimates=edge_estimates
    )


def _binarize_threshold(
    prob: np.ndarray, obs: ObservedMultiplex, threshold: float
) -> np.ndarray:
    predicted = (prob >= threshold).astype(np.uint8)
    predicted = np.where(obs.defined, obs.values, predicted).astype(np.uint8)
    for k in range(obs.layer_count):
        np.fill_diagonal(predicted[k], 0)
    return predicted


def _binarize_top_k(
    prob: np.ndarray, obs: ObservedMultiplex, link_budget
) -> np.ndarray:
    m = obs.layer_count
    if link_budget is None or len(link_budget) != m:
        raise ValueError("top_k binarization needs one link budget per layer")
    predicted = np.where(obs.defined, obs.values, np.zeros_like(obs.values))
    predicted = predicted.astype(np.uint8)
    for k in range(m):
        budget = int(link_budget[k])
        iu, ju = np.nonzero(np.triu(obs.unobserved(k), k=1))
        if budget > iu.size:
            raise ValueError(
                f"layer {k}: budget {budget} exceeds {iu.size} unobserved entries"
            )
        if budget == 0:
            continue
        order = np.argsort(-prob[k][iu, ju], kind="stable")[:budget]
        predicted[k][iu[order], ju[order]] = 1
        predicted[k][ju[order], iu[order]] = 1
    return predicted


def random_baseline(obs: ObservedMultiplex, link_budget, seed: int) -> Reconstruction:
    """Spend exactly the per-layer link budget on uniformly random unobserved
    entries; observed entries are copied through."""
    m = obs.layer_count
    if link_budget is None or len(link_budget) != m:
        raise ValueError("random baseline needs one link budget per layer")
    rng = np.random.default_rng(seed)
    predicted = np.where(obs.defined, obs.values, np.zeros_like(obs.values))
    predicted = predicted.astype(np.uint8)
    for k in range(m):
        budget = int(link_budget[k])
        iu, ju = np.nonzero(np.triu(obs.unobserved(k), k=1))
        if budget > iu.size:
            raise ValueError(
                f"layer {k}: budget {budget} exceeds {iu.size} unobserved entries"
            )
        if budget == 0:
            continue
        chosen = rng.choice(iu.size, size=budget, replace=False)
        predicted[k][iu[chosen], ju[chosen]] = 1
        predicted[k][ju[chosen], iu[chosen]] = 1
    prob = predicted.astype(float)
    degrees = prob.sum(axis=2)
    state = BeliefState(
        prob=prob, degrees=degrees, edge_estimates=degrees.sum(axis=1) / 2.0
    )
    return Reconstruction(
        state=state, predicted=predicted, converged=True, iterations_used=0
    )


def run(
    obs: ObservedMultiplex, cfg: SolverConfig, link_budget=None
) -> Reconstruction:
    """Run the configured method to convergence or the iteration cap.

    Convergence compares unobserved probabilities between consecutive
    iterations (mean absolute difference below the tolerance).  Hitting the
    cap is reported through ``converged=False``, not raised.  Identical
    (obs, cfg, link_budget) inputs give bit-identical output.
    """
    if cfg.method == "rm":
        if link_budget is None:
            raise ValueError("method 'rm' needs a link budget")
        return random_baseline(obs, link_budget, cfg.seed)
    if cfg.method == "ema" and obs.layer_count < 2:
        raise SolverError(
            "method 'ema' needs at least 2 layers; use 'em' for a single layer"
        )
    state = initialize(obs, cfg)
    prev = state.prob.copy()
    converged = False
    iterations = 0
    for it in range(1, cfg.max_iterations + 1):
        state = e_step(state, obs)
        if cfg.method == "ema":
            state = a_step(state, obs, tau=cfg.aggregate_threshold)
        state = m_step(state, mode=cfg.edge_estimate_mode)
        eps = mae_delta(prev, state.prob, obs.mask)
        state.iteration = it
        state.mae_history.append(eps)
        iterations = it
        if eps < cfg.tolerance:
            converged = True
            break
        prev = state.prob.copy()
    if cfg.binarization == "top_k":
        predicted = _binarize_top_k(state.prob, obs, link_budget)
    else:
        predicted = _binarize_threshold(state.prob, obs, cfg.threshold)
    return Reconstruction(
        state=state,
        predicted=predicted,
        converged=converged,
        iterations_used=iterations,
    )
