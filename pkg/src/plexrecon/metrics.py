"""Imbalance-aware evaluation of reconstructions over unobserved entries.

Only unobserved entries count: the observed part is handed to every method,
so scoring it would only dilute the comparison.  Sparse layers make the
label distribution heavily negative, hence MCC and G-mean.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import MultiplexNetwork
from .observe import ObservationMask

__all__ = [
    "ConfusionCounts",
    "MetricReport",
    "confusion",
    "gmean",
    "mae_delta",
    "mcc",
    "metric_report",
]


@dataclass(frozen=True)
class ConfusionCounts:
    tp: int
    tn: int
    fp: int
    fn: int

    def __post_init__(self):
        for name in ("tp", "tn", "fp", "fn"):
            value = getattr(self, name)
            if value < 0:
                raise ValueError(f"{name} must be nonnegative, got {value}")
            object.__setattr__(self, name, int(value))

    @property
    def total(self) -> int:
        return self.tp + self.tn + self.fp + self.fn

    def __add__(self, other: "ConfusionCounts") -> "ConfusionCounts":
        return ConfusionCounts(
            tp=self.tp + other.tp,
            tn=self.tn + other.tn,
            fp=self.fp + other.fp,
            fn=self.fn + other.fn,
        )


@dataclass(frozen=True)
class MetricReport:
    mcc: float
    gmean: float
    recall: float
    specificity: float
    precision: float
    counts: ConfusionCounts


def mcc(counts: ConfusionCounts) -> float:
    """Matthews correlation coefficient; 0 when any denominator factor is 0.

    Exact integer arithmetic in the numerator and under the root, so large
    counts cannot overflow.
    """
    tp, tn, fp, fn = counts.tp, counts.tn, counts.fp, counts.fn
    denom_sq = (tp + fp) * (tp + fn) * (tn + fp) * (tn + fn)
    if denom_sq == 0:
        return 0.0
    return float(tp * tn - fp * fn) / math.sqrt(denom_sq)


def gmean(counts: ConfusionCounts) -> float:
    """Geometric mean of recall and specificity; a 0/0 ratio contributes 0."""
    recall = counts.tp / (counts.tp + counts.fn) if counts.tp + counts.fn else 0.0
    specificity = counts.tn / (counts.tn + counts.fp) if counts.tn + counts.fp else 0.0
    return math.sqrt(recall * specificity)


def metric_report(counts: ConfusionCounts) -> MetricReport:
    """Bundle MCC, G-mean and the component ratios for one confusion table."""
    recall = counts.tp / (counts.tp + counts.fn) if counts.tp + counts.fn else 0.0
    specificity = counts.tn / (counts.tn + counts.fp) if counts.tn + counts.fp else 0.0
    precision = counts.tp / (counts.tp + counts.fp) if counts.tp + counts.fp else 0.0
    return MetricReport(
        mcc=mcc(counts),
        gmean=gmean(counts),
        recall=recall,
        specificity=specificity,
        precision=precision,
        counts=counts,
    )


def _layer_counts(
    predicted: np.ndarray, truth: np.ndarray, unobserved_upper: np.ndarray
) -> ConfusionCounts:
    pred = predicted[unobserved_upper] == 1
    true = truth[unobserved_upper] == 1
    return ConfusionCounts(
        tp=int(np.sum(pred & true)),
        tn=int(np.sum(~pred & ~true)),
        fp=int(np.sum(pred & ~true)),
        fn=int(np.sum(~pred & true)),
    )


def confusion(
    predicted: np.ndarray,
    truth: MultiplexNetwork,
    mask: ObservationMask,
    scope: str = "pooled",
):
    """Confusion counts over unobserved upper-triangle entries.

    ``predicted`` is a (layers, n, n) binary stack.  ``scope="pooled"`` sums
    counts across layers and returns one ConfusionCounts; ``scope="per_layer"``
    returns a list with one ConfusionCounts per layer.
    """
    predicted = np.asarray(predicted)
    n = truth.node_count
    if predicted.shape != (truth.layer_count, n, n):
        raise ValueError(
            f"predicted shape {predicted.shape} does not match network "
            f"({truth.layer_count}, {n}, {n})"
        )
    upper = np.triu(np.ones((n, n), dtype=bool), k=1)
    per_layer = []
    for k, layer in enumerate(truth.layers):
        unobs_upper = upper & ~mask.entry_mask(k)
        per_layer.append(_layer_counts(predicted[k], layer.adjacency, unobs_upper))
    if scope == "per_layer":
        return per_layer
    if scope == "pooled":
        total = per_layer[0]
        for counts in per_layer[1:]:
            total = total + counts
        return total
    raise ValueError("scope must be 'pooled' or 'per_layer'")


def mae_delta(prev: np.ndarray, next: np.ndarray, mask: ObservationMask) -> float:
    """Mean absolute difference over unobserved upper-triangle entries, pooled
    across layers.  Returns 0.0 when nothing is unobserved."""
    prev = np.asarray(prev, dtype=float)
    next = np.asarray(next, dtype=float)
    if prev.shape != next.shape:
        raise ValueError("probability stacks must share a shape")
    n = prev.shape[1]
    upper = np.triu(np.ones((n, n), dtype=bool), k=1)
    total = 0.0
    count = 0
    for k in range(prev.shape[0]):
        unobs_upper = upper & ~mask.entry_mask(k)
        total += float(np.abs(next[k][unobs_upper] - prev[k][unobs_upper]).sum())
        count += int(unobs_upper.sum())
    if count == 0:
        return 0.0
    return total / count
