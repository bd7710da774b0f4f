"""Small random scenes in which every loss has contributors."""

import numpy as np

from app.repositories.dataset import tokenize
from app.schemas.geoentity import Dataset, Geoentity, Geometry
from app.synthcity.vocabulary import BUILDING_TAGS, POI_TAGS

SCENE_SIZE = 200.0
ROAD_PARENT = 10_000
BUILDINGS = ((20.0, 105.0, 60.0, 140.0), (110.0, 104.0, 150.0, 135.0))

_BUILDING_VOCABULARY = tuple(t for tags in BUILDING_TAGS.values() for t in tags)
_POI_VOCABULARY = tuple(t for tags in POI_TAGS.values() for t in tags)


def _tags(rng: np.random.Generator, vocabulary) -> tuple:
    return tokenize([vocabulary[int(rng.integers(len(vocabulary)))]])


def random_scene(rng: np.random.Generator, n_entities: int) -> Dataset:
    """A road, two buildings beside it holding POIs, and free POIs below it.

    The road is split into two segments of one parent way; buildings sit a few
    meters above it, and free POIs lie 40 to 90 meters below it.
    """
    if n_entities < 6:
        raise ValueError("a scene needs at least 6 entities")
    y = SCENE_SIZE / 2
    entities = [
        Geoentity(
            id=k,
            parent_id=ROAD_PARENT,
            tokens=tokenize(["highway=residential"]),
            geometry=Geometry.polyline([(100.0 * k, y), (100.0 * (k + 1), y)]),
        )
        for k in range(2)
    ]
    for box in BUILDINGS:
        entities.append(
            Geoentity(
                id=len(entities),
                tokens=_tags(rng, _BUILDING_VOCABULARY),
                geometry=Geometry.box(*box),
            )
        )
    inside = max(2, (n_entities - 4) // 2)
    for k in range(inside):
        x0, y0, x1, y1 = BUILDINGS[k % 2]
        point = Geometry.point(
            float(rng.uniform(x0 + 1, x1 - 1)), float(rng.uniform(y0 + 1, y1 - 1))
        )
        entities.append(
            Geoentity(
                id=len(entities),
                tokens=_tags(rng, _POI_VOCABULARY),
                geometry=point,
            )
        )
    while len(entities) < n_entities:
        point = Geometry.point(
            float(rng.uniform(10.0, 190.0)), float(y - rng.uniform(40.0, 90.0))
        )
        entities.append(
            Geoentity(
                id=len(entities),
                tokens=_tags(rng, _POI_VOCABULARY),
                geometry=point,
            )
        )
    return Dataset(entities=tuple(entities), extent=(0.0, 0.0, SCENE_SIZE, SCENE_SIZE))
