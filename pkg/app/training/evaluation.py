"""Held-out quality of the pair heads."""

import logging
from typing import Optional, Sequence, Tuple

import numpy as np

from app.context.builder import WindowContext
from app.context.pairs import heldout_samples, sample_global_pairs
from app.core.seeding import derive_seed
from app.losses.rsr import rsr_cells, rsr_plan
from app.models.transformer import DualStreamTransformer
from app.schemas.config import LossConfig, WindowConfig
from app.schemas.report import EvaluationRecord

logger = logging.getLogger(__name__)


def _dispersion_ordering(
    h_sem: np.ndarray,
    context: WindowContext,
    window_config: WindowConfig,
    loss_config: LossConfig,
    root_seed: int,
) -> Tuple[int, int]:
    """Cells whose hinge is inactive, and all cells, of one unmasked window."""
    global_pairs = sample_global_pairs(
        context.window,
        context.kinds,
        context.distances,
        context.relations,
        context.groups,
        window_config.n_global,
        derive_seed(root_seed, "heldout-global", context.window.index),
        window_config.global_buffer,
    )
    plan = rsr_plan(
        context.groups,
        context.row_of,
        context.kinds,
        context.distances,
        global_pairs,
        (),
        loss_config.bin_edges,
    )
    if plan is None:
        return 0, 0
    cells = rsr_cells(h_sem, plan, loss_config.delta)
    return sum(1 for c in cells if c["hinge"] == 0.0), len(cells)


def evaluate_pair_heads(
    model: DualStreamTransformer,
    contexts: Sequence[WindowContext],
    window_config: WindowConfig,
    root_seed: int,
    epoch: int,
    loss_config: Optional[LossConfig] = None,
) -> EvaluationRecord:
    """Relation accuracy and distance MAE in meters on the reserved pairs.

    Only the pairs each context withholds from training are scored. Nothing is
    masked and dropout is off. Predictions are averaged over both presentation
    orders of each pair. With ``loss_config`` the record also holds the share of
    semivariogram cells whose sibling dispersion sits at least ``delta`` below
    the global one.
    """
    correct = 0
    abs_error = 0.0
    n_pairs = 0
    ordered = 0
    n_cells = 0
    for context in contexts:
        pairs = heldout_samples(
            context.window, context.distances, context.relations, context.heldout
        )
        out = model.forward_window(context.semantic, context.geometry)
        if loss_config is not None:
            good, total = _dispersion_ordering(
                out.h_sem.data, context, window_config, loss_config, root_seed
            )
            ordered += good
            n_cells += total
        if not pairs:
            continue
        rows_i = context.rows([p.i for p in pairs])
        rows_j = context.rows([p.j for p in pairs])
        distance, logits = model.predict_pair_symmetric(out.h_fused, rows_i, rows_j)
        target = np.array([int(p.relation) for p in pairs])
        meters = np.array([p.distance for p in pairs])
        correct += int((logits.argmax(axis=1) == target).sum())
        abs_error += float(np.abs(distance * context.window.size - meters).sum())
        n_pairs += len(pairs)
    record = EvaluationRecord(
        epoch=epoch,
        relation_accuracy=correct / n_pairs if n_pairs else 0.0,
        distance_mae=abs_error / n_pairs if n_pairs else 0.0,
        n_pairs=n_pairs,
        ordered_cells=ordered / n_cells if n_cells else 0.0,
        n_cells=n_cells,
    )
    logger.info(
        f"Epoch {epoch} pair heads: accuracy {record.relation_accuracy:.3f}, "
        f"distance MAE {record.distance_mae:.2f} m over {n_pairs} pairs, "
        f"{ordered}/{n_cells} semivariogram cells ordered"
    )
    return record
