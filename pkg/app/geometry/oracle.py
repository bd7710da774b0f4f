"""Brute-force rasterized topology oracle.

Shapes live on an integer grid and are axis-aligned, so every contact between
two shapes happens at lattice points of step 1/4. Sampling the lattice then
decides the relation exactly, independently of the analytic classifier.
"""

from typing import Set, Tuple

import numpy as np

from app.geometry.relations import TopoRelation
from app.schemas.geoentity import Geometry, GeometryKind

LatticePoint = Tuple[int, int]


def random_grid_shape(rng: np.random.Generator, grid: int = 6) -> Geometry:
    """Random point, axis-aligned polyline or rectangle with integer vertices."""
    kind = rng.integers(3)
    if kind == 0:
        x, y = rng.integers(0, grid + 1, size=2)
        return Geometry.point(float(x), float(y))
    if kind == 1:
        x0, y0 = (int(v) for v in rng.integers(0, grid + 1, size=2))
        horizontal = bool(rng.integers(2))
        legs = 1 + int(rng.integers(2))
        coords = [(x0, y0)]
        for _ in range(legs):
            x, y = coords[-1]
            if horizontal:
                choices = [v for v in range(grid + 1) if v != x]
                coords.append((int(rng.choice(choices)), y))
            else:
                choices = [v for v in range(grid + 1) if v != y]
                coords.append((x, int(rng.choice(choices))))
            horizontal = not horizontal
        return Geometry.polyline([(float(x), float(y)) for x, y in coords])
    xs = np.sort(rng.choice(grid + 1, size=2, replace=False))
    ys = np.sort(rng.choice(grid + 1, size=2, replace=False))
    return Geometry.box(float(xs[0]), float(ys[0]), float(xs[1]), float(ys[1]))


def _leg_points(a: np.ndarray, b: np.ndarray, scale: int) -> Set[LatticePoint]:
    ia, ib = np.rint(a * scale).astype(int), np.rint(b * scale).astype(int)
    steps = int(np.max(np.abs(ib - ia)))
    return {
        (
            int(ia[0] + (ib[0] - ia[0]) * k // steps),
            int(ia[1] + (ib[1] - ia[1]) * k // steps),
        )
        for k in range(steps + 1)
    }


def sample_geometry(
    g: Geometry, step: float = 0.25
) -> Tuple[Set[LatticePoint], Set[LatticePoint]]:
    """Lattice samples of the interior and boundary of an axis-aligned shape."""
    scale = int(round(1.0 / step))
    coords = g.array
    if g.kind == GeometryKind.point:
        p = tuple(int(v) for v in np.rint(coords[0] * scale))
        return {p}, set()
    if g.kind == GeometryKind.polyline:
        closure: Set[LatticePoint] = set()
        for a, b in zip(coords[:-1], coords[1:]):
            closure |= _leg_points(a, b, scale)
        ends = {tuple(int(v) for v in np.rint(p * scale)) for p in coords[[0, -1]]}
        return closure - ends, ends
    x0, y0 = np.rint(coords.min(axis=0) * scale).astype(int)
    x1, y1 = np.rint(coords.max(axis=0) * scale).astype(int)
    interior, boundary = set(), set()
    for x in range(x0, x1 + 1):
        for y in range(y0, y1 + 1):
            on_edge = x in (x0, x1) or y in (y0, y1)
            (boundary if on_edge else interior).add((x, y))
    return interior, boundary


def oracle_relation(g1: Geometry, g2: Geometry, step: float = 0.25) -> TopoRelation:
    """Relation decided from lattice samples alone."""
    int1, bnd1 = sample_geometry(g1, step)
    int2, bnd2 = sample_geometry(g2, step)
    closure1, closure2 = int1 | bnd1, int2 | bnd2
    if closure1 <= closure2 or closure2 <= closure1:
        return TopoRelation.CONTAINS
    if not closure1 & closure2:
        return TopoRelation.DISJOINT
    if int1 & int2:
        return TopoRelation.INTERSECTS
    return TopoRelation.ADJACENT
