"""Window Context Schema."""

from enum import Enum
from typing import Tuple

from pydantic import BaseModel, ConfigDict, model_validator

from app.geometry.relations import TopoRelation
from app.schemas.geoentity import Bounds, GeometryKind


class SpatialWindow(BaseModel):
    """Square window over the extent and the ids of its members."""

    model_config = ConfigDict(frozen=True)

    index: int
    bounds: Bounds
    members: Tuple[int, ...] = ()

    @property
    def size(self) -> float:
        """Edge length in meters."""
        return self.bounds[2] - self.bounds[0]

    @property
    def center(self) -> Tuple[float, float]:
        """Window center."""
        x0, y0, x1, y1 = self.bounds
        return (0.5 * (x0 + x1), 0.5 * (y0 + y1))

    @classmethod
    def centered(cls, center: Tuple[float, float], size: float, index: int = -1):
        """Window of the given size around a center point."""
        half = 0.5 * size
        cx, cy = center
        return cls(index=index, bounds=(cx - half, cy - half, cx + half, cy + half))


class MemberType(str, Enum):
    """Geometry kinds allowed inside sibling groups."""

    point = "point"
    polygon = "polygon"


class SiblingGroup(BaseModel):
    """Members sharing one relation to a common anchor."""

    model_config = ConfigDict(frozen=True)

    anchor_key: Tuple[str, int]
    relation: TopoRelation
    member_type: MemberType
    member_ids: Tuple[int, ...]

    @property
    def kind(self) -> GeometryKind:
        """Geometry kind of every member."""
        return GeometryKind(self.member_type.value)


class PairKind(str, Enum):
    """Why a pair was sampled."""

    random = "random"
    hard = "hard"
    global_baseline = "global_baseline"


class PairSample(BaseModel):
    """Sampled entity pair with its metric and topological targets."""

    model_config = ConfigDict(frozen=True)

    i: int
    j: int
    distance: float
    relation: TopoRelation
    kind: PairKind

    @model_validator(mode="after")
    def check_pair(self):
        """Distinct entities; hard pairs are never disjoint."""
        if self.i == self.j:
            raise ValueError("pair needs two distinct entities")
        if self.kind == PairKind.hard and self.relation == TopoRelation.DISJOINT:
            raise ValueError("hard pairs must have a non-disjoint relation")
        return self
