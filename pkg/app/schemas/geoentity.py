"""Geoentity Schema."""

from enum import Enum
from functools import lru_cache
from typing import Dict, List, Optional, Tuple

import numpy as np
from pydantic import (
    BaseModel,
    ConfigDict,
    PrivateAttr,
    field_validator,
    model_validator,
)

from app.geometry.primitives import (
    TOUCH_TOLERANCE,
    as_segments,
    ring_is_simple,
    ring_signed_area,
    segment_lengths,
)

Coordinate = Tuple[float, float]
Bounds = Tuple[float, float, float, float]


class GeometryKind(str, Enum):
    """Geometry kinds."""

    point = "point"
    polyline = "polyline"
    polygon = "polygon"


KIND_ORDER = {GeometryKind.point: 0, GeometryKind.polyline: 1, GeometryKind.polygon: 2}


@lru_cache(maxsize=65536)
def _coords_array(coords: Tuple[Coordinate, ...]) -> np.ndarray:
    array = np.asarray(coords, dtype=np.float64).reshape(-1, 2)
    array.setflags(write=False)
    return array


def geometry_problem(kind: GeometryKind, coords: np.ndarray) -> Optional[str]:
    """Name the first violated geometry invariant, or ``None``."""
    if kind == GeometryKind.point:
        if len(coords) != 1:
            return "point must have exactly 1 vertex"
        return None
    if kind == GeometryKind.polyline:
        if len(coords) < 2:
            return "polyline needs at least 2 vertices"
        if float(np.sum(segment_lengths(coords))) <= 0.0:
            return "polyline has zero length"
        return None
    if len(coords) < 3:
        return "polygon needs at least 4 vertices"
    if not np.array_equal(coords[0], coords[-1]):
        return "polygon not closed"
    if len(coords) < 4:
        return "polygon needs at least 4 vertices"
    if abs(ring_signed_area(coords)) <= 0.0:
        return "polygon has zero area"
    if not ring_is_simple(coords):
        return "polygon is self-intersecting"
    return None


class Geometry(BaseModel):
    """Typed geometry in planar meters."""

    model_config = ConfigDict(frozen=True)

    kind: GeometryKind
    coords: Tuple[Coordinate, ...]

    @field_validator("coords")
    @classmethod
    def check_finite(cls, coords: Tuple[Coordinate, ...]) -> Tuple[Coordinate, ...]:
        """Coordinates must be finite numbers."""
        if not coords:
            raise ValueError("geometry has no coordinates")
        if not np.all(np.isfinite(np.asarray(coords, dtype=np.float64))):
            raise ValueError("geometry coordinates must be finite")
        return coords

    @model_validator(mode="after")
    def check_invariants(self):
        """Check the per-kind vertex, length, closure and simplicity rules."""
        problem = geometry_problem(self.kind, self.array)
        if problem is not None:
            raise ValueError(problem)
        return self

    @property
    def array(self) -> np.ndarray:
        """Read-only ``(m, 2)`` coordinate array."""
        return _coords_array(self.coords)

    @property
    def segments(self) -> np.ndarray:
        """Edges (polyline, polygon ring) or the degenerate point segment."""
        return as_segments(self.array)

    @property
    def bounds(self) -> Bounds:
        """Bounding box ``(x_min, y_min, x_max, y_max)``."""
        array = self.array
        x_min, y_min = array.min(axis=0)
        x_max, y_max = array.max(axis=0)
        return float(x_min), float(y_min), float(x_max), float(y_max)

    @property
    def endpoints(self) -> np.ndarray:
        """Polyline boundary (first and last vertex); empty for other kinds."""
        if self.kind != GeometryKind.polyline:
            return np.empty((0, 2))
        return self.array[[0, -1]]

    @classmethod
    def point(cls, x: float, y: float) -> "Geometry":
        """Point geometry."""
        return cls(kind=GeometryKind.point, coords=((x, y),))

    @classmethod
    def polyline(cls, coords: List[Coordinate]) -> "Geometry":
        """Polyline geometry."""
        return cls(kind=GeometryKind.polyline, coords=tuple(map(tuple, coords)))

    @classmethod
    def polygon(cls, ring: List[Coordinate]) -> "Geometry":
        """Polygon from a ring; the ring is closed if it is not already."""
        ring = [tuple(p) for p in ring]
        if ring and ring[0] != ring[-1]:
            ring.append(ring[0])
        return cls(kind=GeometryKind.polygon, coords=tuple(ring))

    @classmethod
    def box(cls, x0: float, y0: float, x1: float, y1: float) -> "Geometry":
        """Axis-aligned rectangle polygon."""
        return cls.polygon([(x0, y0), (x1, y0), (x1, y1), (x0, y1)])


class Geoentity(BaseModel):
    """Geoentity Class."""

    model_config = ConfigDict(frozen=True)

    id: int
    parent_id: Optional[int] = None
    tokens: Tuple[str, ...] = ()
    geometry: Geometry

    @property
    def kind(self) -> GeometryKind:
        """Geometry kind."""
        return self.geometry.kind

    @property
    def token_key(self) -> Tuple[str, ...]:
        """Canonical multiset key; equal keys mean identical token multisets."""
        return tuple(sorted(self.tokens))

    @property
    def anchor_key(self) -> Tuple[str, int]:
        """Anchor identity; noded polyline segments collapse onto their parent."""
        if self.kind == GeometryKind.polyline and self.parent_id is not None:
            return ("way", self.parent_id)
        return (self.kind.value, self.id)


class GeoentityRecord(BaseModel):
    """One line of the ingestion format."""

    model_config = ConfigDict(extra="forbid")

    id: int
    parent_id: Optional[int] = None
    kind: GeometryKind
    coords: List[Tuple[float, float]]
    tags: List[str] = []


class Dataset(BaseModel):
    """Dataset Class."""

    model_config = ConfigDict(frozen=True)

    entities: Tuple[Geoentity, ...]
    extent: Bounds

    _by_id: Dict[int, Geoentity] = PrivateAttr(default_factory=dict)

    @model_validator(mode="after")
    def check_extent(self):
        """Extent is non-empty, ids are unique and every geometry lies inside."""
        x_min, y_min, x_max, y_max = self.extent
        if x_max - x_min <= 0 or y_max - y_min <= 0:
            raise ValueError("extent must have positive width and height")
        seen = set()
        for entity in self.entities:
            if entity.id in seen:
                raise ValueError(f"duplicate entity id {entity.id}")
            seen.add(entity.id)
            ex0, ey0, ex1, ey1 = entity.geometry.bounds
            tol = TOUCH_TOLERANCE
            if (
                ex0 < x_min - tol
                or ey0 < y_min - tol
                or ex1 > x_max + tol
                or ey1 > y_max + tol
            ):
                raise ValueError(f"entity {entity.id} lies outside the extent")
        return self

    def model_post_init(self, __context) -> None:
        """Index entities by id."""
        self._by_id = {entity.id: entity for entity in self.entities}

    def get(self, _id: int) -> Geoentity:
        """Entity by id."""
        return self._by_id[_id]

    def __contains__(self, _id: int) -> bool:
        """Whether the dataset holds an entity with this id."""
        return _id in self._by_id

    def __len__(self) -> int:
        """Number of entities."""
        return len(self.entities)

    @property
    def width(self) -> float:
        """Extent width."""
        return self.extent[2] - self.extent[0]

    @property
    def height(self) -> float:
        """Extent height."""
        return self.extent[3] - self.extent[1]

    @classmethod
    def from_entities(
        cls, entities: List[Geoentity], extent: Optional[Bounds] = None
    ) -> "Dataset":
        """Build a dataset, computing the extent from geometry bounds if absent."""
        if extent is None:
            if not entities:
                raise ValueError("cannot infer the extent of an empty dataset")
            bounds = np.array([e.geometry.bounds for e in entities])
            x_min, y_min = bounds[:, 0].min(), bounds[:, 1].min()
            x_max, y_max = bounds[:, 2].max(), bounds[:, 3].max()
            if x_max - x_min <= 0:
                x_min, x_max = x_min - 0.5, x_max + 0.5
            if y_max - y_min <= 0:
                y_min, y_max = y_min - 0.5, y_max + 0.5
            extent = (float(x_min), float(y_min), float(x_max), float(y_max))
        return cls(entities=tuple(entities), extent=extent)
