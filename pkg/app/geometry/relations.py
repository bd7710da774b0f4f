"""Metric and topological relations between geometries."""

from enum import IntEnum
from typing import NamedTuple

import numpy as np

from app.geometry.primitives import (
    TOUCH_TOLERANCE,
    point_in_ring,
    point_segment_distances,
    ring_signed_area,
    segment_lengths,
    segment_set_distance,
    split_pieces,
)
from app.schemas.geoentity import KIND_ORDER, Geometry, GeometryKind
from exceptions.exceptions import GeometryValidationException


class TopoRelation(IntEnum):
    """Symmetric relation codes, higher code wins on overlap."""

    DISJOINT = 0
    INTERSECTS = 1
    ADJACENT = 2
    CONTAINS = 3


class Location(IntEnum):
    """Where a point falls relative to a geometry."""

    EXTERIOR = 0
    BOUNDARY = 1
    INTERIOR = 2


class Descriptors(NamedTuple):
    """Centroid, length (perimeter for polygons) and area."""

    centroid: tuple[float, float]
    length: float
    area: float


def locate_point(
    point: np.ndarray, g: Geometry, tol: float = TOUCH_TOLERANCE
) -> Location:
    """Locate a point against a geometry's interior, boundary or exterior."""
    distance = float(np.min(point_segment_distances(point[None], g.segments)))
    if g.kind == GeometryKind.point:
        return Location.INTERIOR if distance <= tol else Location.EXTERIOR
    if g.kind == GeometryKind.polyline:
        if distance > tol:
            return Location.EXTERIOR
        ends = g.endpoints
        if float(np.min(np.hypot(*(ends - point).T))) <= tol:
            return Location.BOUNDARY
        return Location.INTERIOR
    if distance <= tol:
        return Location.BOUNDARY
    return Location.INTERIOR if point_in_ring(point, g.array) else Location.EXTERIOR


def min_distance(g1: Geometry, g2: Geometry) -> float:
    """Minimum Euclidean distance between the two closed point sets."""
    distance = segment_set_distance(g1.segments, g2.segments)
    if distance <= 0.0:
        return 0.0
    if g1.kind == GeometryKind.polygon and point_in_ring(g2.array[0], g1.array):
        return 0.0
    if g2.kind == GeometryKind.polygon and point_in_ring(g1.array[0], g2.array):
        return 0.0
    return distance


def _within_closed(inner: Geometry, outer: Geometry, tol: float) -> bool:
    if outer.kind == GeometryKind.point:
        return (
            inner.kind == GeometryKind.point
            and float(np.hypot(*(inner.array[0] - outer.array[0]))) <= tol
        )
    if inner.kind == GeometryKind.point:
        return locate_point(inner.array[0], outer, tol) != Location.EXTERIOR
    if inner.kind == GeometryKind.polygon and outer.kind == GeometryKind.polyline:
        return False

    points, midpoints = split_pieces(inner.segments, outer.segments, tol)
    candidates = np.concatenate([points, midpoints])
    return all(locate_point(p, outer, tol) != Location.EXTERIOR for p in candidates)


def _any_located(points: np.ndarray, g: Geometry, where: Location, tol: float) -> bool:
    return any(locate_point(p, g, tol) == where for p in points)


def _interiors_intersect(g1: Geometry, g2: Geometry, tol: float) -> bool:
    """Interior overlap test for touching pairs where neither contains the other."""
    if g1.kind == GeometryKind.polyline and g2.kind == GeometryKind.polyline:
        points1, mids1 = split_pieces(g1.segments, g2.segments, tol)
        points2, mids2 = split_pieces(g2.segments, g1.segments, tol)
        candidates = np.concatenate([points1, mids1, points2, mids2])
        return any(
            locate_point(p, g1, tol) == Location.INTERIOR
            and locate_point(p, g2, tol) == Location.INTERIOR
            for p in candidates
        )
    if g1.kind == GeometryKind.polyline and g2.kind == GeometryKind.polygon:
        _, mids = split_pieces(g1.segments, g2.segments, tol)
        return _any_located(mids, g2, Location.INTERIOR, tol)
    # polygon / polygon: some boundary piece of one enters the other's interior
    _, mids1 = split_pieces(g1.segments, g2.segments, tol)
    if _any_located(mids1, g2, Location.INTERIOR, tol):
        return True
    _, mids2 = split_pieces(g2.segments, g1.segments, tol)
    return _any_located(mids2, g1, Location.INTERIOR, tol)


def classify_relation(
    g1: Geometry, g2: Geometry, tol: float = TOUCH_TOLERANCE
) -> TopoRelation:
    """Classify the symmetric topological relation of two geometries.

    Precedence is contains/within > adjacent > intersects > disjoint. Containment
    is tested against the closed region, so a point on a polygon's boundary or on
    a polyline counts as contained.
    """
    if KIND_ORDER[g1.kind] > KIND_ORDER[g2.kind]:
        g1, g2 = g2, g1
    if min_distance(g1, g2) > tol:
        return TopoRelation.DISJOINT
    if _within_closed(g1, g2, tol) or _within_closed(g2, g1, tol):
        return TopoRelation.CONTAINS
    if _interiors_intersect(g1, g2, tol):
        return TopoRelation.INTERSECTS
    return TopoRelation.ADJACENT


def within_buffer(anchor: Geometry, member: Geometry, radius: float) -> bool:
    """Whether ``member`` lies within ``radius`` meters of ``anchor``."""
    if radius < 0:
        raise GeometryValidationException(f"buffer radius must be >= 0, got {radius}")
    return min_distance(anchor, member) <= radius


def geometry_descriptors(g: Geometry) -> Descriptors:
    """Centroid, length and area used by the geometry encoder."""
    coords = g.array
    if g.kind == GeometryKind.point:
        return Descriptors((float(coords[0, 0]), float(coords[0, 1])), 0.0, 0.0)

    lengths = segment_lengths(coords)
    total = float(np.sum(lengths))
    if g.kind == GeometryKind.polyline:
        mids = 0.5 * (coords[:-1] + coords[1:])
        cx, cy = (lengths[:, None] * mids).sum(axis=0) / total
        return Descriptors((float(cx), float(cy)), total, 0.0)

    signed = ring_signed_area(coords)
    x, y = coords[:-1, 0], coords[:-1, 1]
    xn, yn = coords[1:, 0], coords[1:, 1]
    cross = x * yn - xn * y
    cx = float(np.sum((x + xn) * cross) / (6.0 * signed))
    cy = float(np.sum((y + yn) * cross) / (6.0 * signed))
    return Descriptors((cx, cy), total, abs(signed))

