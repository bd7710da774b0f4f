"""Downstream probe tasks: zone classification and road speed regression."""

import logging
from collections import defaultdict
from dataclasses import dataclass
from typing import Dict, List, Sequence

import numpy as np

from app.geometry.primitives import segment_set_distance
from app.probes.heads import LinearProbe, LogisticProbe
from app.probes.metrics import classification_scores, regression_scores
from app.probes.splits import CLASSIFICATION_SPLIT, REGRESSION_SPLIT, split_indices
from app.schemas.config import ProbeConfig
from app.schemas.geoentity import Dataset
from app.schemas.report import ClassificationMetrics, RegressionMetrics
from exceptions.exceptions import ProbeException

logger = logging.getLogger(__name__)

MIN_ROADS = 10


def probe_classify(
    features: Dict[int, np.ndarray],
    labels: Dict[int, int],
    config: ProbeConfig,
    seed: int,
) -> ClassificationMetrics:
    """Logistic probe on a 50/25/25 split, scored on the test split."""
    ids = sorted(_id for _id in labels if _id in features)
    classes = sorted({labels[_id] for _id in ids})
    if len(classes) < 2:
        raise ProbeException("classification needs at least two classes")
    class_index = {c: k for k, c in enumerate(classes)}
    x = np.stack([features[_id] for _id in ids])
    y = np.array([class_index[labels[_id]] for _id in ids])
    train, val, test = split_indices(len(ids), CLASSIFICATION_SPLIT, seed)

    head = LogisticProbe(len(classes), config.learning_rate, config.epochs)
    head.fit(x[train], y[train], x[val], y[val])
    scores = classification_scores(y[test], head.predict(x[test]))
    logger.info(f"Zone probe macro-F1 {scores['macro_f1']:.2f} on {len(test)} samples")
    return ClassificationMetrics(
        **scores,
        n_classes=len(classes),
        n_train=len(train),
        n_val=len(val),
        n_test=len(test),
    )


@dataclass(frozen=True)
class RoadTable:
    """Roads with pooled segment features and mean segment speeds."""

    road_ids: List[int]
    features: np.ndarray
    targets: np.ndarray
    segments: List[np.ndarray]


def pool_roads(
    dataset: Dataset, features: Dict[int, np.ndarray], speeds: Dict[int, float]
) -> RoadTable:
    """Average segment features and speeds per parent road."""
    members: Dict[int, List[int]] = defaultdict(list)
    for _id in sorted(speeds):
        if _id not in features or _id not in dataset:
            continue
        entity = dataset.get(_id)
        parent = entity.parent_id if entity.parent_id is not None else -1 - _id
        members[parent].append(_id)
    road_ids = sorted(members)
    return RoadTable(
        road_ids=road_ids,
        features=np.stack(
            [np.mean([features[s] for s in members[r]], axis=0) for r in road_ids]
        ),
        targets=np.array([np.mean([speeds[s] for s in members[r]]) for r in road_ids]),
        segments=[
            np.concatenate([dataset.get(s).geometry.segments for s in members[r]])
            for r in road_ids
        ],
    )


def neighbor_mean_speed(
    table: RoadTable, known: Sequence[int], radius: float
) -> np.ndarray:
    """Mean target of known roads within ``radius`` of each road, itself excluded.

    Roads with no known neighbor fall back to the mean over known roads.
    """
    known = list(known)
    fallback = float(table.targets[known].mean())
    values = np.full(len(table.road_ids), fallback)
    for r in range(len(table.road_ids)):
        near = [
            k
            for k in known
            if k != r
            and segment_set_distance(table.segments[r], table.segments[k]) <= radius
        ]
        if near:
            values[r] = float(table.targets[near].mean())
    return values


def probe_regress(
    table: RoadTable, config: ProbeConfig, seed: int
) -> RegressionMetrics:
    """Linear probe on a 60/20/20 split of roads, scored on the test split."""
    n = len(table.road_ids)
    if n < MIN_ROADS:
        raise ProbeException(f"regression needs at least {MIN_ROADS} roads, got {n}")
    train, val, test = split_indices(n, REGRESSION_SPLIT, seed)
    x = table.features
    if config.neighbor_mean_feature:
        extra = neighbor_mean_speed(table, train, config.neighbor_radius)
        x = np.concatenate([x, extra[:, None]], axis=1)
    y = table.targets

    head = LinearProbe(config.learning_rate, config.epochs)
    head.fit(x[train], y[train], x[val], y[val])
    scores = regression_scores(y[test], head.predict(x[test]))
    logger.info(f"Speed probe MAE {scores['mae']:.3f} on {len(test)} roads")
    return RegressionMetrics(
        **scores, n_train=len(train), n_val=len(val), n_test=len(test)
    )
