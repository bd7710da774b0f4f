"""Sliding windows, membership and mask selection."""

import logging
import math
from typing import List, Sequence, Tuple

import numpy as np

from app.geometry.index import GridIndex
from app.geometry.primitives import TOUCH_TOLERANCE
from app.geometry.relations import min_distance
from app.schemas.context import SpatialWindow
from app.schemas.geoentity import Bounds, Dataset, Geoentity, Geometry

logger = logging.getLogger(__name__)


def _axis_origins(low: float, extent: float, size: float, stride: float) -> List[float]:
    count = max(0, math.floor((extent - size) / stride)) + 1
    return [low + k * stride for k in range(count)]


def build_windows(extent: Bounds, size: float, stride: float) -> List[SpatialWindow]:
    """Square windows tiling the extent, row by row from the lower-left corner."""
    if size <= 0 or not 0 < stride <= size:
        raise ValueError("windows need size > 0 and 0 < stride <= size")
    x_min, y_min, x_max, y_max = extent
    windows = []
    for y0 in _axis_origins(y_min, y_max - y_min, size, stride):
        for x0 in _axis_origins(x_min, x_max - x_min, size, stride):
            windows.append(
                SpatialWindow(index=len(windows), bounds=(x0, y0, x0 + size, y0 + size))
            )
    return windows


def build_index(entities: Sequence[Geoentity], cell_size: float) -> GridIndex:
    """Grid index over entity bounding boxes."""
    index = GridIndex(cell_size)
    for entity in entities:
        index.insert(entity.id, entity.geometry.bounds)
    return index


def _inside(inner: Bounds, outer: Bounds) -> bool:
    return (
        inner[0] >= outer[0]
        and inner[1] >= outer[1]
        and inner[2] <= outer[2]
        and inner[3] <= outer[3]
    )


def nearest_members(
    ids: Sequence[int],
    dataset: Dataset,
    center: Tuple[float, float],
    cap: int,
) -> Tuple[int, ...]:
    """The ``cap`` ids closest to ``center``, ties broken by id, in id order."""
    if len(ids) <= cap:
        return tuple(sorted(ids))
    point = Geometry.point(*center)
    ranked = sorted(
        ids, key=lambda _id: (min_distance(dataset.get(_id).geometry, point), _id)
    )
    return tuple(sorted(ranked[:cap]))


def window_members(
    window: SpatialWindow, dataset: Dataset, index: GridIndex, cap: int
) -> Tuple[int, ...]:
    """Ids of entities intersecting the window, capped to those nearest its center."""
    box = Geometry.box(*window.bounds)
    members = []
    for _id in index.query(window.bounds):
        geometry = dataset.get(_id).geometry
        if _inside(geometry.bounds, window.bounds):
            members.append(_id)
        elif min_distance(geometry, box) <= TOUCH_TOLERANCE:
            members.append(_id)
    return nearest_members(members, dataset, window.center, cap)


def assign_members(
    windows: Sequence[SpatialWindow], dataset: Dataset, cap: int
) -> List[SpatialWindow]:
    """Windows with their member lists resolved."""
    if not windows:
        return []
    index = build_index(dataset.entities, windows[0].size)
    resolved = [
        w.model_copy(update={"members": window_members(w, dataset, index, cap)})
        for w in windows
    ]
    logger.info(
        f"Resolved {len(resolved)} windows, "
        f"{sum(len(w.members) for w in resolved)} memberships in total"
    )
    return resolved


def select_masks(
    members: Sequence[int], ratio: float, rng: np.random.Generator
) -> Tuple[int, ...]:
    """Uniform sample of ``max(1, floor(ratio * n))`` members, empty below 2 members."""
    if not 0 < ratio < 1:
        raise ValueError("mask ratio must lie in (0, 1)")
    if len(members) < 2:
        return ()
    count = max(1, math.floor(ratio * len(members)))
    chosen = rng.choice(len(members), size=count, replace=False)
    return tuple(sorted(members[k] for k in chosen))
