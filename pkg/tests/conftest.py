"""Shared fixtures."""

import numpy as np
import pytest

from app.context.builder import WindowContext, build_window_context, sample_window
from app.encoders.semantic import SemanticEncoder
from app.models.params import init_params
from app.models.transformer import DualStreamTransformer
from app.schemas.config import (
    CityParams,
    ExperimentConfig,
    ModelConfig,
    ProbeConfig,
    TrainConfig,
    WindowConfig,
)
from app.schemas.context import SpatialWindow
from app.schemas.geoentity import Dataset, Geoentity, Geometry
from app.synthcity.scene import SCENE_SIZE, random_scene

################################################ Geometry


@pytest.fixture()
def square():
    """Fixture that returns a 10 m square polygon at the origin."""
    return Geometry.box(0.0, 0.0, 10.0, 10.0)


@pytest.fixture()
def inner_point():
    """Fixture that returns a point inside the square."""
    return Geometry.point(5.0, 5.0)


@pytest.fixture()
def far_point():
    """Fixture that returns a point 10 m right of the square."""
    return Geometry.point(20.0, 5.0)


################################################ Config


@pytest.fixture()
def tiny_model_config():
    """Fixture that returns a small model configuration."""
    return ModelConfig(
        d_sem=16,
        d_model=8,
        d_ff=16,
        n_layers=1,
        n_heads=2,
        dropout=0.0,
        codebook_rows=64,
    )


@pytest.fixture()
def tiny_window_config():
    """Fixture that returns a window configuration covering one scene."""
    return WindowConfig(
        size=SCENE_SIZE,
        stride=SCENE_SIZE,
        mask_ratio=0.3,
        n_random=6,
        n_hard=4,
        n_global=8,
    )


@pytest.fixture()
def tiny_config(tiny_model_config, tiny_window_config):
    """Fixture that returns a small experiment configuration."""
    return ExperimentConfig(
        seed=7,
        model=tiny_model_config,
        window=tiny_window_config,
        train=TrainConfig(epochs=2, batch_windows=2, eval_every=1),
        city=CityParams(extent=300.0, road_spacing=100.0),
        probe=ProbeConfig(radius=50.0, epochs=20, learning_rate=0.05),
    )


################################################ Data


@pytest.fixture()
def scene():
    """Fixture that returns a random scene of ten entities."""
    return random_scene(np.random.default_rng(3), 10)


@pytest.fixture()
def small_dataset():
    """Fixture that returns a road, a building and two POIs."""
    return Dataset.from_entities(
        [
            Geoentity(
                id=1,
                parent_id=100,
                tokens=("highway", "residential"),
                geometry=Geometry.polyline([(0.0, 0.0), (50.0, 0.0)]),
            ),
            Geoentity(
                id=2,
                tokens=("building", "house"),
                geometry=Geometry.box(10.0, 5.0, 30.0, 20.0),
            ),
            Geoentity(
                id=3, tokens=("amenity", "cafe"), geometry=Geometry.point(20, 10)
            ),
            Geoentity(id=4, tokens=("shop", "bakery"), geometry=Geometry.point(40, 30)),
        ],
        extent=(0.0, 0.0, 50.0, 50.0),
    )


@pytest.fixture()
def encoder(tiny_model_config):
    """Fixture that returns a semantic encoder matching the tiny model."""
    return SemanticEncoder(
        tiny_model_config.d_sem, tiny_model_config.codebook_rows, seed=7
    )


@pytest.fixture()
def scene_context(scene, encoder, tiny_window_config) -> WindowContext:
    """Fixture that returns the context of a window covering the whole scene."""
    window = SpatialWindow(
        index=0,
        bounds=scene.extent,
        members=tuple(e.id for e in scene.entities),
    )
    return build_window_context(window, scene, encoder, tiny_window_config)


@pytest.fixture()
def scene_sample(scene_context, tiny_window_config):
    """Fixture that returns the epoch-0 draws of the scene window."""
    return sample_window(scene_context, tiny_window_config, root_seed=7, epoch=0)


################################################ Model


@pytest.fixture()
def tiny_params(tiny_model_config):
    """Fixture that returns freshly initialized parameters."""
    return init_params(tiny_model_config, seed=7)


@pytest.fixture()
def tiny_model(tiny_params, tiny_model_config):
    """Fixture that returns a model over the tiny parameters."""
    return DualStreamTransformer(tiny_params, tiny_model_config)
