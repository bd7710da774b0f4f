"""Anchor sibling groups."""

from collections import defaultdict
from typing import Dict, List, Sequence, Tuple

import numpy as np

from app.geometry.primitives import TOUCH_TOLERANCE
from app.geometry.relations import TopoRelation
from app.schemas.config import WindowConfig
from app.schemas.context import MemberType, SiblingGroup, SpatialWindow
from app.schemas.geoentity import Geoentity, GeometryKind

GroupKey = Tuple[Tuple[str, int], TopoRelation, MemberType]


def _group_order(item: Tuple[GroupKey, List[int]]) -> tuple:
    (anchor_key, relation, member_type), _ = item
    return anchor_key, int(relation), member_type.value


def build_sibling_groups(
    window: SpatialWindow,
    entities: Sequence[Geoentity],
    distances: np.ndarray,
    relations: np.ndarray,
    config: WindowConfig,
) -> List[SiblingGroup]:
    """Group window members by their relation to each polyline or polygon anchor.

    Noded segments of one way form a single anchor; a member's relation to it is
    read from its nearest segment. Polylines are never members.
    """
    if len(entities) != len(window.members):
        raise ValueError("entities must align with the window members")
    ways: Dict[Tuple[str, int], List[int]] = defaultdict(list)
    polygons: List[int] = []
    for row, entity in enumerate(entities):
        if entity.kind == GeometryKind.polyline:
            ways[entity.anchor_key].append(row)
        elif entity.kind == GeometryKind.polygon:
            polygons.append(row)

    grouped: Dict[GroupKey, List[int]] = defaultdict(list)
    for anchor_key, segments in ways.items():
        for row, entity in enumerate(entities):
            if entity.kind == GeometryKind.polyline:
                continue
            gaps = distances[row, segments]
            nearest = float(gaps.min())
            if nearest > config.polyline_buffer:
                continue
            ties = [
                s for s, gap in zip(segments, gaps) if gap <= nearest + TOUCH_TOLERANCE
            ]
            relation = TopoRelation(max(int(relations[row, s]) for s in ties))
            member_type = MemberType(entity.kind.value)
            grouped[(anchor_key, relation, member_type)].append(entity.id)

    for anchor in polygons:
        anchor_key = entities[anchor].anchor_key
        for row, entity in enumerate(entities):
            if entity.kind != GeometryKind.point:
                continue
            if distances[row, anchor] > config.polygon_buffer:
                continue
            relation = TopoRelation(int(relations[row, anchor]))
            grouped[(anchor_key, relation, MemberType.point)].append(entity.id)

    return [
        SiblingGroup(
            anchor_key=key[0],
            relation=key[1],
            member_type=key[2],
            member_ids=tuple(ids),
        )
        for key, ids in sorted(grouped.items(), key=_group_order)
        if ids
    ]
