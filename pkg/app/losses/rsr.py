"""Relational semivariogram regularizer."""

from dataclasses import dataclass, field
from itertools import combinations
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from app.autodiff import ops
from app.autodiff.tensor import Tensor, const
from app.schemas.context import PairSample, SiblingGroup
from app.schemas.geoentity import GeometryKind


def bin_index(distances, edges: Sequence[float]) -> np.ndarray:
    """Bin of each distance, ``-1`` when it falls past the last edge."""
    distances = np.atleast_1d(np.asarray(distances, dtype=np.float64))
    edges = np.asarray(edges, dtype=np.float64)
    bins = np.searchsorted(edges, distances, side="right") - 1
    bins[(distances >= edges[-1]) | (distances < edges[0])] = -1
    return bins


def empirical_semivariance(
    h_sem: Tensor, pairs: Sequence[Tuple[int, int]]
) -> Tensor:
    """Mean ``1 - cos`` over row pairs of ``h_sem``."""
    if not pairs:
        raise ValueError("semivariance needs at least one pair")
    normalized = ops.l2_normalize_rows(h_sem)
    left = ops.gather_rows(normalized, [i for i, _ in pairs])
    right = ops.gather_rows(normalized, [j for _, j in pairs])
    similarity = ops.mean(ops.sum(ops.multiply(left, right), axis=1))
    return const(1.0) - similarity


@dataclass
class RsrPlan:
    """Linear map from pair similarities to hinge inputs for one window.

    Each hinge entry ``e`` is one (group, bin) cell with a type-matched global
    estimate; ``relational[e] @ s`` and ``baseline[e] @ s`` are the mean
    sibling and mean global similarities in that cell.
    """

    left: List[int] = field(default_factory=list)
    right: List[int] = field(default_factory=list)
    relational: List[np.ndarray] = field(default_factory=list)
    baseline: List[np.ndarray] = field(default_factory=list)
    weights: List[float] = field(default_factory=list)
    cells: List[Tuple[int, int]] = field(default_factory=list)
    n_groups: int = 0

    def add_pair(self, i: int, j: int) -> int:
        """Register a pair and return its column."""
        self.left.append(i)
        self.right.append(j)
        return len(self.left) - 1

    def matrices(self) -> Tuple[np.ndarray, np.ndarray]:
        """Dense ``(entries, pairs)`` averaging matrices."""
        p = len(self.left)
        rel = np.zeros((len(self.relational), p))
        glob = np.zeros((len(self.baseline), p))
        for e, (r, g) in enumerate(zip(self.relational, self.baseline)):
            rel[e, : r.size] = r
            glob[e, : g.size] = g
        return rel, glob


def _averaging_row(columns: Sequence[int]) -> np.ndarray:
    row = np.zeros(max(columns) + 1)
    row[list(columns)] = 1.0 / len(columns)
    return row


def rsr_plan(
    groups: Sequence[SiblingGroup],
    row_of: Dict[int, int],
    kinds: Sequence[GeometryKind],
    distances: np.ndarray,
    global_pairs: Sequence[PairSample],
    masked_rows: Sequence[int],
    edges: Sequence[float],
) -> Optional[RsrPlan]:
    """Collect the hinge cells of one window, or ``None`` without groups.

    Only unmasked entities take part. Bins without a type-matched global
    estimate are skipped while keeping the group's bin weights unchanged.
    """
    masked = set(masked_rows)
    plan = RsrPlan()
    baseline_cols: Dict[Tuple[GeometryKind, int], List[int]] = {}
    for pair in global_pairs:
        i, j = row_of[pair.i], row_of[pair.j]
        if i in masked or j in masked:
            continue
        b = int(bin_index(distances[i, j], edges)[0])
        if b >= 0:
            baseline_cols.setdefault((kinds[i], b), []).append(plan.add_pair(i, j))

    for g, group in enumerate(groups):
        rows = [row_of[_id] for _id in group.member_ids]
        rows = [row for row in rows if row not in masked]
        if len(rows) < 2:
            continue
        pairs = list(combinations(rows, 2))
        bins = bin_index([distances[i, j] for i, j in pairs], edges)
        binned = int((bins >= 0).sum())
        if binned == 0:
            continue
        plan.n_groups += 1
        for b in sorted(set(int(x) for x in bins if x >= 0)):
            reference = baseline_cols.get((group.kind, b))
            if not reference:
                continue
            members = [pair for pair, x in zip(pairs, bins) if x == b]
            columns = [plan.add_pair(i, j) for i, j in members]
            plan.relational.append(_averaging_row(columns))
            plan.baseline.append(_averaging_row(reference))
            plan.weights.append(len(members) / binned)
            plan.cells.append((g, b))
    return plan if plan.n_groups else None


def rsr_window_loss(h_sem: Tensor, plan: Optional[RsrPlan], delta: float) -> Tensor:
    """Bin-weighted hinge summed per group and averaged over groups."""
    if plan is None or not plan.weights:
        return const(0.0)
    normalized = ops.l2_normalize_rows(h_sem)
    left = ops.gather_rows(normalized, plan.left)
    right = ops.gather_rows(normalized, plan.right)
    similarity = ops.sum(ops.multiply(left, right), axis=1)
    rel, glob = plan.matrices()
    margin = const(np.full((rel.shape[0], 1), delta))
    hinge = ops.relu(const(glob - rel) @ similarity + margin)
    weights = np.asarray(plan.weights)[None, :] / plan.n_groups
    return const(weights) @ hinge


def rsr_cells(
    h_sem: np.ndarray, plan: RsrPlan, delta: float
) -> List[Dict[str, float]]:
    """Per-cell relational and global semivariances with the hinge value."""
    norms = np.linalg.norm(h_sem, axis=1, keepdims=True)
    unit = h_sem / np.maximum(norms, 1e-12)
    similarity = np.sum(unit[plan.left] * unit[plan.right], axis=1)
    rel, glob = plan.matrices()
    cells = []
    for e, (group, b) in enumerate(plan.cells):
        gamma_rel = 1.0 - float(rel[e] @ similarity)
        gamma_glob = 1.0 - float(glob[e] @ similarity)
        cells.append(
            {
                "group": group,
                "bin": b,
                "weight": plan.weights[e],
                "gamma_rel": gamma_rel,
                "gamma_glob": gamma_glob,
                "hinge": max(0.0, gamma_rel - gamma_glob + delta),
            }
        )
    return cells


def loss_rsr(window_losses: Sequence[Tensor], n_windows: int) -> Tensor:
    """Batch regularizer: window values summed and divided by the batch size."""
    if n_windows < 1:
        raise ValueError("batch needs at least one window")
    total = const(0.0)
    for loss in window_losses:
        total = total + loss
    return ops.scale(total, 1.0 / n_windows)
