"""Planar geometry primitives on numpy coordinate arrays.

Coordinates are ``(m, 2)`` float arrays in meters. Segment sets are ``(k, 2, 2)``
arrays of ``[start, end]`` pairs; a single point is the degenerate segment
``[p, p]``.
"""

from typing import List

import numpy as np

TOUCH_TOLERANCE = 1e-6


def as_segments(coords: np.ndarray) -> np.ndarray:
    """Consecutive-vertex segments of a coordinate sequence."""
    if len(coords) == 1:
        return np.stack([coords, coords], axis=1)
    return np.stack([coords[:-1], coords[1:]], axis=1)


def segment_lengths(coords: np.ndarray) -> np.ndarray:
    """Length of each consecutive segment."""
    return np.hypot(*np.diff(coords, axis=0).T)


def ring_signed_area(ring: np.ndarray) -> float:
    """Shoelace area of a closed ring, positive when counter-clockwise."""
    x, y = ring[:-1, 0], ring[:-1, 1]
    xn, yn = ring[1:, 0], ring[1:, 1]
    return 0.5 * float(np.sum(x * yn - xn * y))


def point_segment_distances(points: np.ndarray, segments: np.ndarray) -> np.ndarray:
    """Distance from every point to every segment, shape ``(m, k)``."""
    a = segments[:, 0][None, :, :]
    ab = (segments[:, 1] - segments[:, 0])[None, :, :]
    ap = points[:, None, :] - a
    denom = np.sum(ab * ab, axis=-1)
    safe = np.where(denom > 0.0, denom, 1.0)
    t = np.where(denom > 0.0, np.sum(ap * ab, axis=-1) / safe, 0.0)
    t = np.clip(t, 0.0, 1.0)
    closest = a + t[..., None] * ab
    return np.hypot(*(points[:, None, :] - closest).transpose(2, 0, 1))


def _orientation(o: np.ndarray, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return (a[..., 0] - o[..., 0]) * (b[..., 1] - o[..., 1]) - (
        a[..., 1] - o[..., 1]
    ) * (b[..., 0] - o[..., 0])


def segments_cross(sa: np.ndarray, sb: np.ndarray) -> np.ndarray:
    """Proper (interior) crossings between two segment sets, shape ``(k1, k2)``."""
    a, b = sa[:, None, 0], sa[:, None, 1]
    c, d = sb[None, :, 0], sb[None, :, 1]
    o1 = _orientation(a, b, c)
    o2 = _orientation(a, b, d)
    o3 = _orientation(c, d, a)
    o4 = _orientation(c, d, b)
    return (o1 * o2 < 0.0) & (o3 * o4 < 0.0)


def segment_pair_distances(sa: np.ndarray, sb: np.ndarray) -> np.ndarray:
    """Minimum distance between every segment of ``sa`` and every one of ``sb``."""
    d = np.minimum(
        point_segment_distances(sa[:, 0], sb), point_segment_distances(sa[:, 1], sb)
    )
    d = np.minimum(d, point_segment_distances(sb[:, 0], sa).T)
    d = np.minimum(d, point_segment_distances(sb[:, 1], sa).T)
    return np.where(segments_cross(sa, sb), 0.0, d)


def segment_set_distance(sa: np.ndarray, sb: np.ndarray) -> float:
    """Minimum distance between two segment sets."""
    return float(np.min(segment_pair_distances(sa, sb)))


def point_in_ring(point: np.ndarray, ring: np.ndarray) -> bool:
    """Crossing-number test; points on the boundary are not decided here."""
    x, y = float(point[0]), float(point[1])
    xi, yi = ring[:-1, 0], ring[:-1, 1]
    xj, yj = ring[1:, 0], ring[1:, 1]
    straddles = (yi > y) != (yj > y)
    dy = np.where(straddles, yj - yi, 1.0)
    x_cross = xi + (xj - xi) * (y - yi) / dy
    return bool(np.count_nonzero(straddles & (x < x_cross)) % 2 == 1)


def ring_is_simple(ring: np.ndarray, tol: float = TOUCH_TOLERANCE) -> bool:
    """Whether a closed ring has no self-intersections or repeated vertices."""
    segments = as_segments(ring)
    k = len(segments)
    if np.any(segment_lengths(ring) <= tol):
        return False
    distances = segment_pair_distances(segments, segments)
    for i in range(k):
        for j in range(i + 1, k):
            adjacent = j == i + 1 or (i == 0 and j == k - 1)
            if not adjacent and distances[i, j] <= tol:
                return False
    # adjacent edges may only share their common vertex
    for i in range(k):
        nxt = (i + 1) % k
        far_next = segments[nxt, 1][None, :]
        far_prev = segments[i, 0][None, :]
        if point_segment_distances(far_next, segments[i : i + 1])[0, 0] <= tol:
            return False
        if point_segment_distances(far_prev, segments[nxt : nxt + 1])[0, 0] <= tol:
            return False
    return True


def crossing_parameter(segment: np.ndarray, other: np.ndarray) -> float:
    """Parameter along ``segment`` of its proper crossing with ``other``."""
    a, b = segment
    c, d = other
    r, s = b - a, d - c
    denom = r[0] * s[1] - r[1] * s[0]
    return float(((c[0] - a[0]) * s[1] - (c[1] - a[1]) * s[0]) / denom)


def split_parameters(
    segment: np.ndarray, others: np.ndarray, tol: float = TOUCH_TOLERANCE
) -> List[float]:
    """Sorted parameters where ``segment`` meets the vertices or crossings of others."""
    a, b = segment
    ab = b - a
    length_sq = float(ab @ ab)
    params = {0.0, 1.0}
    if length_sq == 0.0:
        return [0.0]

    vertices = others.reshape(-1, 2)
    on_segment = point_segment_distances(vertices, segment[None])[:, 0] <= tol
    for v in vertices[on_segment]:
        params.add(float(np.clip((v - a) @ ab / length_sq, 0.0, 1.0)))

    crosses = segments_cross(segment[None], others)[0]
    for other in others[crosses]:
        params.add(crossing_parameter(segment, other))

    ordered = sorted(params)
    merged = [ordered[0]]
    min_step = tol / np.sqrt(length_sq)
    for t in ordered[1:]:
        if t - merged[-1] > min_step:
            merged.append(t)
    if merged[-1] != 1.0:
        merged[-1] = 1.0
    return merged


def split_pieces(
    segments: np.ndarray, others: np.ndarray, tol: float = TOUCH_TOLERANCE
) -> tuple[np.ndarray, np.ndarray]:
    """Split segments at every contact with ``others``.

    Returns:
        The split points and the piece midpoints, each as an ``(m, 2)`` array.
    """
    points, midpoints = [], []
    for segment in segments:
        a, b = segment
        params = split_parameters(segment, others, tol)
        locations = [a + t * (b - a) for t in params]
        points.extend(locations)
        for p, q in zip(locations, locations[1:]):
            midpoints.append(0.5 * (p + q))
    return np.asarray(points).reshape(-1, 2), np.asarray(midpoints).reshape(-1, 2)
