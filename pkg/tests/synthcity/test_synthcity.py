"""Synthetic city and scene generator unit tests."""

import numpy as np
import pytest

from app.geometry.relations import TopoRelation, classify_relation
from app.schemas.config import CityParams
from app.schemas.geoentity import GeometryKind
from app.synthcity.generator import generate_city, grid_positions
from app.synthcity.scene import BUILDINGS, ROAD_PARENT, SCENE_SIZE, random_scene

################################################ City


@pytest.fixture()
def small_city(tiny_config):
    """Fixture that returns a 300 m city with 100 m blocks."""
    return generate_city(tiny_config.city, seed=11)


def test_grid_positions():
    """Test grid lines run from 0 to the extent inclusive."""
    assert grid_positions(300.0, 100.0).tolist() == [0.0, 100.0, 200.0, 300.0]


def test_default_city_has_220_road_segments():
    """Test a 1000 m city at 100 m spacing has 22 lines of 10 segments."""
    city = generate_city(CityParams(), seed=0)
    roads = [e for e in city.dataset.entities if e.kind == GeometryKind.polyline]
    assert len(roads) == 220
    assert [e.id for e in roads] == list(range(220))
    assert len({e.parent_id for e in roads}) == 22


def test_city_layout(small_city, tiny_config):
    """Test ids run over roads, then buildings, then POIs."""
    kinds = [e.kind for e in small_city.dataset.entities]
    assert kinds[:24] == [GeometryKind.polyline] * 24
    assert kinds[24:51] == [GeometryKind.polygon] * 27
    assert set(kinds[51:]) <= {GeometryKind.point}
    assert [e.id for e in small_city.dataset.entities] == list(range(len(kinds)))
    extent = tiny_config.city.extent
    assert small_city.dataset.extent == (0.0, 0.0, extent, extent)


def test_city_stays_inside_extent(small_city, tiny_config):
    """Test every coordinate lies within the city square."""
    for entity in small_city.dataset.entities:
        coords = entity.geometry.array
        assert coords.min() >= 0.0
        assert coords.max() <= tiny_config.city.extent


def test_roads_keep_their_tags(small_city):
    """Test road segments are always tagged with their class."""
    for entity in small_city.dataset.entities[:24]:
        assert entity.tokens[0] == "highway"
        assert entity.tokens[1] in {"primary", "residential"}


def test_city_labels(small_city, tiny_config):
    """Test roads carry speeds and buildings carry zones."""
    speeds = {r.id: r.speed for r in small_city.labels if r.speed is not None}
    zones = {r.id: r.zone for r in small_city.labels if r.zone is not None}
    assert sorted(speeds) == list(range(24))
    assert sorted(zones) == list(range(24, 51))
    assert min(speeds.values()) >= 5.0
    assert set(zones.values()) <= set(range(tiny_config.city.n_zones))


def test_building_pois_lie_inside_buildings(tiny_config):
    """Test POIs placed in buildings are contained by one."""
    params = tiny_config.city.model_copy(
        update={"building_poi_probability": 1.0, "street_poi_probability": 0.0}
    )
    entities = generate_city(params, seed=5).dataset.entities
    buildings = entities[24:51]
    for poi in entities[51:]:
        assert any(
            classify_relation(b.geometry, poi.geometry) == TopoRelation.CONTAINS
            for b in buildings
        )


def test_city_is_deterministic(tiny_config):
    """Test the same seed gives the same city and another seed does not."""
    first = generate_city(tiny_config.city, seed=4)
    second = generate_city(tiny_config.city, seed=4)
    other = generate_city(tiny_config.city, seed=5)
    assert first.dataset == second.dataset
    assert first.labels == second.labels
    assert first.labels != other.labels


################################################ Scene


def test_random_scene_layout():
    """Test the road, the buildings and the POIs inside them."""
    scene = random_scene(np.random.default_rng(0), 12)
    entities = scene.entities
    assert len(entities) == 12
    assert scene.extent == (0.0, 0.0, SCENE_SIZE, SCENE_SIZE)
    assert [e.parent_id for e in entities[:2]] == [ROAD_PARENT, ROAD_PARENT]
    assert [e.geometry.bounds for e in entities[2:4]] == list(BUILDINGS)
    for k, poi in enumerate(entities[4:8]):
        building = entities[2 + k % 2]
        contains = classify_relation(building.geometry, poi.geometry)
        assert contains == TopoRelation.CONTAINS
    for poi in entities[8:]:
        assert poi.geometry.array[0, 1] < SCENE_SIZE / 2 - 39.0


def test_random_scene_needs_six_entities():
    """Test scenes smaller than six entities are rejected."""
    with pytest.raises(ValueError):
        random_scene(np.random.default_rng(0), 5)
