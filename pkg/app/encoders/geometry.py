"""Fourier-feature geometry encoder in a window-local frame.

Layout of the 21 features: 16 mean-pooled sinusoids (4 frequencies times
sin/cos of x and y), a 3-way kind one-hot, ``log1p(length)`` and
``log1p(area)``.
"""

from typing import Sequence, Tuple

import numpy as np

from app.geometry.primitives import segment_lengths
from app.geometry.relations import geometry_descriptors
from app.schemas.context import SpatialWindow
from app.schemas.geoentity import KIND_ORDER, Geometry, GeometryKind

N_SAMPLES = 16
FREQUENCIES = 2.0 ** np.arange(4)
GEOMETRY_DIM = 4 * len(FREQUENCIES) + 3 + 2


def sample_geometry_points(g: Geometry, m: int = N_SAMPLES) -> np.ndarray:
    """``m`` points spread uniformly by arc length along the geometry."""
    coords = g.array
    if g.kind == GeometryKind.point:
        return np.repeat(coords[:1], m, axis=0)
    cumulative = np.concatenate([[0.0], np.cumsum(segment_lengths(coords))])
    total = cumulative[-1]
    if g.kind == GeometryKind.polyline:
        positions = np.linspace(0.0, total, m)
    else:
        positions = np.arange(m) * (total / m)
    return np.column_stack(
        [
            np.interp(positions, cumulative, coords[:, 0]),
            np.interp(positions, cumulative, coords[:, 1]),
        ]
    )


def to_window_frame(
    points: np.ndarray, center: Tuple[float, float], size: float
) -> np.ndarray:
    """Map points to ``(p - center) / (size / 2)``."""
    return (points - np.asarray(center)) / (0.5 * size)


def fourier_features(local: np.ndarray) -> np.ndarray:
    """Mean over samples of ``[sin, cos](pi f x)`` and ``[sin, cos](pi f y)``."""
    angles_x = np.pi * local[:, :1] * FREQUENCIES[None, :]
    angles_y = np.pi * local[:, 1:2] * FREQUENCIES[None, :]
    stacked = np.stack(
        [np.sin(angles_x), np.cos(angles_x), np.sin(angles_y), np.cos(angles_y)],
        axis=2,
    )
    return stacked.mean(axis=0).reshape(-1)


def encode_geometry(g: Geometry, window: SpatialWindow) -> np.ndarray:
    """21-dimensional embedding of a geometry framed by a window."""
    local = to_window_frame(sample_geometry_points(g), window.center, window.size)
    one_hot = np.zeros(3)
    one_hot[KIND_ORDER[g.kind]] = 1.0
    descriptors = geometry_descriptors(g)
    return np.concatenate(
        [
            fourier_features(local),
            one_hot,
            [np.log1p(descriptors.length), np.log1p(descriptors.area)],
        ]
    )


def encode_geometries(
    geometries: Sequence[Geometry], window: SpatialWindow
) -> np.ndarray:
    """``(n, 21)`` matrix of geometry embeddings."""
    if not geometries:
        return np.empty((0, GEOMETRY_DIM))
    return np.stack([encode_geometry(g, window) for g in geometries])
