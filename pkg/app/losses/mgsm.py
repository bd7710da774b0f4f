"""Masked geoentity semantic modeling loss."""

from typing import List, Sequence, Tuple

import numpy as np

from app.autodiff import ops
from app.autodiff.tensor import Tensor, const


def mgsm_contributors(
    token_keys: Sequence[Tuple[str, ...]], masked_rows: Sequence[int]
) -> List[int]:
    """Masked rows whose candidate set holds at least one other entity."""
    return [
        row
        for row in masked_rows
        if any(key != token_keys[row] for key in token_keys)
    ]


def candidate_mask(
    token_keys: Sequence[Tuple[str, ...]], rows: Sequence[int]
) -> np.ndarray:
    """``(k, n)`` indicator of entities with differing tokens, plus the row itself."""
    mask = np.zeros((len(rows), len(token_keys)))
    for k, row in enumerate(rows):
        for col, key in enumerate(token_keys):
            if col == row or key != token_keys[row]:
                mask[k, col] = 1.0
    return mask


def mgsm_terms(
    predicted: Tensor,
    targets: np.ndarray,
    rows: Sequence[int],
    token_keys: Sequence[Tuple[str, ...]],
    tau: float,
) -> Tuple[Tensor, int]:
    """Summed InfoNCE over reconstructed rows and the number of rows.

    ``predicted`` holds one reconstruction per entry of ``rows``; rows are
    expected to come from :func:`mgsm_contributors`.
    """
    count = len(rows)
    if count == 0:
        return const(0.0), 0
    n = targets.shape[0]
    unit_targets = targets / np.linalg.norm(targets, axis=1, keepdims=True)
    shift = 1.0 / tau
    sims = ops.scale(ops.l2_normalize_rows(predicted) @ const(unit_targets.T), shift)
    candidates = candidate_mask(token_keys, rows)
    positives = np.zeros((count, n))
    positives[np.arange(count), list(rows)] = 1.0

    shifted = ops.exp(sims - const(np.full((count, n), shift)))
    log_partition = ops.log(ops.sum(ops.multiply(shifted, const(candidates)), axis=1))
    positive = ops.sum(ops.multiply(sims, const(positives)), axis=1)
    total = ops.sum(log_partition - positive) + const(count * shift)
    return total, count


def loss_mgsm(
    predicted: Tensor,
    targets: np.ndarray,
    rows: Sequence[int],
    token_keys: Sequence[Tuple[str, ...]],
    tau: float,
) -> Tensor:
    """Mean InfoNCE over contributing masked entities (0 when none contribute)."""
    total, count = mgsm_terms(predicted, targets, rows, token_keys, tau)
    return ops.scale(total, 1.0 / count) if count else total
