"""Pairwise distance and topology loss."""

from typing import Tuple

import numpy as np

from app.autodiff import ops
from app.autodiff.tensor import Tensor, const
from app.models.params import N_RELATIONS


def cross_entropy_rows(logits: Tensor, targets: np.ndarray) -> Tensor:
    """Per-row cross-entropy ``(k, 1)`` against integer class targets."""
    k = logits.shape[0]
    row_max = logits.data.max(axis=1, keepdims=True)
    shifted = ops.exp(logits - const(np.broadcast_to(row_max, logits.shape)))
    log_partition = ops.log(ops.sum(shifted, axis=1)) + const(row_max)
    one_hot = np.zeros((k, logits.shape[1]))
    one_hot[np.arange(k), np.asarray(targets, dtype=np.int64)] = 1.0
    return log_partition - ops.sum(ops.multiply(logits, const(one_hot)), axis=1)


def geo_terms(
    distance_pred: Tensor,
    relation_logits: Tensor,
    distance_target: np.ndarray,
    relation_target: np.ndarray,
    alpha_topo: float,
    alpha_dist: float,
) -> Tuple[Tensor, int]:
    """Summed ``alpha_topo * CE + alpha_dist * squared error`` and the example count."""
    k = distance_pred.shape[0]
    if k == 0:
        return const(0.0), 0
    if relation_logits.shape != (k, N_RELATIONS):
        raise ValueError("relation logits must be (k, 4)")
    target = np.asarray(distance_target, dtype=np.float64)[:, None]
    error = distance_pred - const(target)
    entropy = cross_entropy_rows(relation_logits, relation_target)
    per_pair = ops.scale(entropy, alpha_topo)
    per_pair = per_pair + ops.scale(ops.multiply(error, error), alpha_dist)
    return ops.sum(per_pair), k


def loss_geo(
    distance_pred: Tensor,
    relation_logits: Tensor,
    distance_target: np.ndarray,
    relation_target: np.ndarray,
    alpha_topo: float,
    alpha_dist: float,
) -> Tensor:
    """Mean combined pair loss."""
    total, count = geo_terms(
        distance_pred,
        relation_logits,
        distance_target,
        relation_target,
        alpha_topo,
        alpha_dist,
    )
    return ops.scale(total, 1.0 / count) if count else total
