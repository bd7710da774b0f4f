"""Deterministic synthetic city with latent zone and speed labels."""

import logging
from dataclasses import dataclass
from typing import Dict, List, Sequence, Tuple

import numpy as np

from app.core.seeding import derive_rng
from app.geometry.primitives import point_segment_distances
from app.repositories.dataset import tokenize
from app.schemas.config import CityParams
from app.schemas.geoentity import Dataset, Geoentity, Geometry
from app.schemas.report import LabelRecord
from app.synthcity.vocabulary import (
    BUILDING_TAGS,
    POI_TAGS,
    ROAD_SPEED_BASE,
    ROAD_TAGS,
    STREET_TAGS,
    ZONES,
)

logger = logging.getLogger(__name__)

PRECISION = 3


@dataclass(frozen=True)
class SyntheticCity:
    """Generated dataset and the labels hidden from pretraining."""

    dataset: Dataset
    labels: Tuple[LabelRecord, ...]


@dataclass
class _Draft:
    geometry: Geometry
    tags: Tuple[str, ...]
    parent_id: int | None = None
    zone: int | None = None
    road_class: str | None = None


def grid_positions(extent: float, spacing: float) -> np.ndarray:
    """Grid-line offsets ``0, s, 2s, ...`` up to the extent."""
    return np.arange(int(np.floor(extent / spacing + 1e-9)) + 1) * spacing


def _round(value: float) -> float:
    return round(float(value), PRECISION)


def _roads(params: CityParams, positions: np.ndarray) -> List[_Draft]:
    nodes = np.unique(np.concatenate([positions, [0.0, params.extent]]))
    drafts = []
    for axis in (0, 1):
        for k, offset in enumerate(positions):
            line_id = axis * len(positions) + k
            road_class = "primary" if k % params.primary_every == 0 else "residential"
            for a, b in zip(nodes[:-1], nodes[1:]):
                coords = [(_round(a), _round(offset)), (_round(b), _round(offset))]
                if axis == 1:
                    coords = [(y, x) for x, y in coords]
                drafts.append(
                    _Draft(
                        geometry=Geometry.polyline(coords),
                        tags=(ROAD_TAGS[road_class],),
                        parent_id=line_id,
                        road_class=road_class,
                    )
                )
    return drafts


def _pick(rng: np.random.Generator, options: Sequence[str]) -> str:
    return options[int(rng.integers(len(options)))]


def _zone_tags(
    rng: np.random.Generator, table: Dict[str, tuple], zone: int, noise: float
) -> Sequence[str]:
    """Tag options of the zone, or of a random zone with probability ``noise``."""
    if rng.random() < noise:
        zone = int(rng.integers(len(table)))
    return table[ZONES[zone]]


def _district_zones(
    params: CityParams, n_blocks: int, rng: np.random.Generator
) -> Dict[Tuple[int, int], int]:
    n_districts = -(-n_blocks // params.district_blocks)
    others = params.n_zones - 1
    zones = {}
    for dx in range(n_districts):
        for dy in range(n_districts):
            if rng.random() < params.dominant_zone_share:
                zones[(dx, dy)] = 0
            else:
                zones[(dx, dy)] = 1 + int(rng.integers(others))
    return zones


def _buildings(
    params: CityParams, positions: np.ndarray, rng: np.random.Generator
) -> List[_Draft]:
    n_blocks = len(positions) - 1
    zones = _district_zones(params, n_blocks, rng)
    table = {z: BUILDING_TAGS[z] for z in ZONES[: params.n_zones]}
    drafts = []
    for i in range(n_blocks):
        for j in range(n_blocks):
            x0, x1 = positions[i], positions[i + 1]
            y0, y1 = positions[j], positions[j + 1]
            zone = zones[(i // params.district_blocks, j // params.district_blocks)]
            quadrants = rng.permutation(4)[: params.buildings_per_block]
            for quadrant in sorted(int(q) for q in quadrants):
                box = _quadrant_box(
                    rng, (x0, y0, x1, y1), quadrant % 2, quadrant // 2
                )
                tag = _pick(rng, _zone_tags(rng, table, zone, params.token_noise))
                drafts.append(
                    _Draft(geometry=Geometry.box(*box), tags=(tag,), zone=zone)
                )
    return drafts


def _quadrant_box(
    rng: np.random.Generator, block: Tuple[float, ...], qx: int, qy: int
) -> Tuple[float, float, float, float]:
    """Rectangle set back a few meters from the block corner of a quadrant."""
    x0, y0, x1, y1 = block
    spans = []
    for low, high, side in ((x0, x1, qx), (y0, y1, qy)):
        width = high - low
        setback = rng.uniform(0.3, 0.8) * min(10.0, 0.1 * width)
        size = rng.uniform(0.2, 0.4) * width
        if side == 0:
            spans.append((low + setback, low + setback + size))
        else:
            spans.append((high - setback - size, high - setback))
    (bx0, bx1), (by0, by1) = spans
    return _round(bx0), _round(by0), _round(bx1), _round(by1)


def _building_pois(
    params: CityParams, buildings: Sequence[_Draft], rng: np.random.Generator
) -> List[_Draft]:
    table = {z: POI_TAGS[z] for z in ZONES[: params.n_zones]}
    drafts = []
    for building in buildings:
        if params.pois_per_building == 0:
            break
        if rng.random() >= params.building_poi_probability:
            continue
        options = _zone_tags(rng, table, building.zone, params.token_noise)
        categories = rng.choice(len(options), size=min(2, len(options)), replace=False)
        bx0, by0, bx1, by1 = building.geometry.bounds
        for _ in range(int(rng.integers(1, params.pois_per_building + 1))):
            x = _round(rng.uniform(bx0 + 0.5, bx1 - 0.5))
            y = _round(rng.uniform(by0 + 0.5, by1 - 0.5))
            tag = options[int(rng.choice(categories))]
            drafts.append(_Draft(geometry=Geometry.point(x, y), tags=(tag,)))
    return drafts


def _street_pois(
    params: CityParams, roads: Sequence[_Draft], rng: np.random.Generator
) -> List[_Draft]:
    drafts = []
    for road in roads:
        if rng.random() >= params.street_poi_probability:
            continue
        start, end = road.geometry.array
        direction = (end - start) / np.linalg.norm(end - start)
        normal = np.array([-direction[1], direction[0]])
        offset = rng.uniform(5.0, 20.0) * (1.0 if rng.random() < 0.5 else -1.0)
        base = start + rng.uniform(0.2, 0.8) * (end - start)
        point = base + offset * normal
        if np.any(point < 0.0) or np.any(point > params.extent):
            point = base - offset * normal
        tag = _pick(rng, STREET_TAGS)
        geometry = Geometry.point(_round(point[0]), _round(point[1]))
        drafts.append(_Draft(geometry=geometry, tags=(tag,)))
    return drafts


def road_speeds(
    params: CityParams,
    roads: Sequence[_Draft],
    pois: Sequence[_Draft],
    rng: np.random.Generator,
) -> np.ndarray:
    """Class speed minus a POI-density penalty plus Gaussian noise, at least 5."""
    segments = np.stack([r.geometry.array for r in roads])
    if pois:
        points = np.stack([p.geometry.array[0] for p in pois])
        near = point_segment_distances(points, segments) <= params.speed_density_radius
        density = near.sum(axis=0)
    else:
        density = np.zeros(len(roads))
    base = np.array([ROAD_SPEED_BASE[r.road_class] for r in roads])
    noise = rng.normal(0.0, params.speed_noise, size=len(roads))
    speeds = base - params.speed_density_coef * density + noise
    return np.round(np.maximum(speeds, 5.0), PRECISION)


def generate_city(params: CityParams, seed: int) -> SyntheticCity:
    """Grid roads, set-back buildings and POIs with correlated tags and labels.

    Ids run over roads, then buildings, then POIs inside buildings, then street
    POIs. A fraction of buildings and POIs lose their tags.
    """
    positions = grid_positions(params.extent, params.road_spacing)
    roads = _roads(params, positions)
    buildings = _buildings(params, positions, derive_rng(seed, "city", "buildings"))
    inner = _building_pois(params, buildings, derive_rng(seed, "city", "pois"))
    street = _street_pois(params, roads, derive_rng(seed, "city", "street"))
    speed_rng = derive_rng(seed, "city", "speed")
    speeds = road_speeds(params, roads, inner + street, speed_rng)

    drafts = roads + buildings + inner + street
    blank = derive_rng(seed, "city", "blank")
    entities = []
    labels = []
    for _id, draft in enumerate(drafts):
        tags = draft.tags
        if draft.road_class is None and blank.random() < params.empty_token_fraction:
            tags = ()
        entities.append(
            Geoentity(
                id=_id,
                parent_id=draft.parent_id,
                tokens=tokenize(tags),
                geometry=draft.geometry,
            )
        )
        if draft.road_class is not None:
            labels.append(LabelRecord(id=_id, speed=float(speeds[_id])))
        elif draft.zone is not None:
            labels.append(LabelRecord(id=_id, zone=draft.zone))
    dataset = Dataset(
        entities=tuple(entities), extent=(0.0, 0.0, params.extent, params.extent)
    )
    logger.info(
        f"Generated city with {len(roads)} road segments, {len(buildings)} "
        f"buildings and {len(inner) + len(street)} POIs"
    )
    return SyntheticCity(dataset=dataset, labels=tuple(labels))
