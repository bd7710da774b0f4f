"""Anchor-conditioned contrastive loss over sibling sets."""

from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Set, Tuple

import numpy as np

from app.autodiff import ops
from app.autodiff.tensor import Tensor, const
from app.schemas.context import SiblingGroup
from app.schemas.geoentity import GeometryKind


@dataclass(frozen=True)
class AccPlan:
    """Anchor rows of one window with their positive weights and contrast sets."""

    rows: Tuple[int, ...]
    weights: np.ndarray
    contrast: np.ndarray

    @property
    def size(self) -> int:
        """Number of contributing entities."""
        return len(self.rows)


def decay_weights(distances: np.ndarray, decay_lambda: float) -> np.ndarray:
    """``exp(-d / lambda)`` normalized to sum to one."""
    weights = np.exp(-np.asarray(distances, dtype=np.float64) / decay_lambda)
    return weights / weights.sum()


def sibling_sets(
    groups: Sequence[SiblingGroup], row_of: Dict[int, int], masked: Set[int]
) -> Dict[int, Set[int]]:
    """Unmasked siblings per unmasked row, unioned over every shared group."""
    siblings: Dict[int, Set[int]] = {}
    for group in groups:
        rows = [row_of[_id] for _id in group.member_ids if row_of[_id] not in masked]
        for row in rows:
            others = {other for other in rows if other != row}
            if others:
                siblings.setdefault(row, set()).update(others)
    return siblings


def acc_plan(
    groups: Sequence[SiblingGroup],
    row_of: Dict[int, int],
    kinds: Sequence[GeometryKind],
    distances: np.ndarray,
    masked_rows: Sequence[int],
    decay_lambda: float,
) -> Optional[AccPlan]:
    """Weights and contrast masks for every row with a non-empty sibling set.

    The contrast set of a row is every other unmasked member of the same
    geometry kind, which covers its siblings and the same-type non-siblings.
    """
    masked = set(masked_rows)
    siblings = sibling_sets(groups, row_of, masked)
    if not siblings:
        return None
    n = len(kinds)
    rows: List[int] = sorted(siblings)
    weights = np.zeros((len(rows), n))
    contrast = np.zeros((len(rows), n))
    for k, row in enumerate(rows):
        positives = sorted(siblings[row])
        weights[k, positives] = decay_weights(distances[row, positives], decay_lambda)
        for col in range(n):
            if col != row and col not in masked and kinds[col] == kinds[row]:
                contrast[k, col] = 1.0
    return AccPlan(rows=tuple(rows), weights=weights, contrast=contrast)


def acc_window_loss(h_sem: Tensor, plan: Optional[AccPlan], tau: float) -> Tensor:
    """Mean per-entity loss of one window (0 when nothing contributes)."""
    if plan is None or plan.size == 0:
        return const(0.0)
    q, n = plan.weights.shape
    shift = 1.0 / tau
    normalized = ops.l2_normalize_rows(h_sem)
    anchors = ops.gather_rows(normalized, plan.rows)
    sims = ops.scale(anchors @ normalized.T, shift)
    shifted = ops.exp(sims - const(np.full((q, n), shift)))
    masked = ops.multiply(shifted, const(plan.contrast))
    log_partition = ops.log(ops.sum(masked, axis=1))
    positive = ops.sum(ops.multiply(sims, const(plan.weights)), axis=1)
    total = ops.sum(log_partition - positive) + const(q * shift)
    return ops.scale(total, 1.0 / q)


def loss_acc(window_losses: Sequence[Tensor], n_windows: int) -> Tensor:
    """Batch loss: window means summed and divided by the batch size."""
    if n_windows < 1:
        raise ValueError("batch needs at least one window")
    total = const(0.0)
    for loss in window_losses:
        total = total + loss
    return ops.scale(total, 1.0 / n_windows)
