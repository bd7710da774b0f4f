"""Precomputed per-window context and per-epoch samples."""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import cached_property
from typing import Dict, List, Optional, Tuple

import numpy as np

from app.context.pairs import (
    RowPair,
    pairwise_geometry,
    reserve_heldout_pairs,
    sample_geo_pairs,
    sample_global_pairs,
)
from app.context.siblings import build_sibling_groups
from app.context.windows import assign_members, build_windows, select_masks
from app.core.seeding import derive_rng, derive_seed
from app.encoders.geometry import encode_geometries
from app.encoders.semantic import SemanticEncoder, get_encoder
from app.schemas.config import ExperimentConfig, WindowConfig
from app.schemas.context import PairSample, SiblingGroup, SpatialWindow
from app.schemas.geoentity import Dataset, Geoentity, GeometryKind
from exceptions.exceptions import DataException

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class WindowContext:
    """Everything about a window that does not change between epochs."""

    window: SpatialWindow
    entities: Tuple[Geoentity, ...]
    semantic: np.ndarray
    geometry: np.ndarray
    distances: np.ndarray
    relations: np.ndarray
    groups: Tuple[SiblingGroup, ...] = field(default=())
    heldout: Tuple[RowPair, ...] = field(default=())

    @property
    def n(self) -> int:
        """Number of members."""
        return len(self.entities)

    @property
    def ids(self) -> Tuple[int, ...]:
        """Member ids in row order."""
        return self.window.members

    @cached_property
    def row_of(self) -> Dict[int, int]:
        """Row index per member id."""
        return {_id: row for row, _id in enumerate(self.window.members)}

    @cached_property
    def kinds(self) -> Tuple[GeometryKind, ...]:
        """Geometry kind per row."""
        return tuple(e.kind for e in self.entities)

    @cached_property
    def token_keys(self) -> Tuple[Tuple[str, ...], ...]:
        """Token multiset key per row."""
        return tuple(e.token_key for e in self.entities)

    def rows(self, ids) -> List[int]:
        """Rows of the given ids."""
        return [self.row_of[_id] for _id in ids]


@dataclass(frozen=True)
class WindowSample:
    """Random draws of one window for one epoch."""

    masked: Tuple[int, ...]
    geo_pairs: Tuple[PairSample, ...]
    global_pairs: Tuple[PairSample, ...]


def build_window_context(
    window: SpatialWindow,
    dataset: Dataset,
    encoder: SemanticEncoder,
    window_config: WindowConfig,
    root_seed: int = 0,
) -> WindowContext:
    """Encode members, precompute their pairwise geometry and sibling groups.

    A seeded share of the member pairs is reserved for held-out evaluation.
    """
    entities = tuple(dataset.get(_id) for _id in window.members)
    distances, relations = pairwise_geometry(entities)
    groups = build_sibling_groups(window, entities, distances, relations, window_config)
    return WindowContext(
        window=window,
        entities=entities,
        semantic=encoder.encode_many([e.tokens for e in entities]),
        geometry=encode_geometries([e.geometry for e in entities], window),
        distances=distances,
        relations=relations,
        groups=tuple(groups),
        heldout=reserve_heldout_pairs(
            relations,
            window_config.heldout_fraction,
            derive_seed(root_seed, "heldout", window.index),
        ),
    )


def build_contexts(
    dataset: Dataset,
    config: ExperimentConfig,
    encoder: Optional[SemanticEncoder] = None,
    workers: int = 1,
) -> List[WindowContext]:
    """Contexts of every window holding at least two members."""
    if encoder is None:
        encoder = get_encoder(
            config.seed, config.model.d_sem, config.model.codebook_rows
        )
    windows = build_windows(dataset.extent, config.window.size, config.window.stride)
    windows = [
        w
        for w in assign_members(windows, dataset, config.window.member_cap)
        if len(w.members) >= 2
    ]
    if not windows:
        raise DataException("no window holds at least two entities")

    def build(window: SpatialWindow) -> WindowContext:
        return build_window_context(
            window, dataset, encoder, config.window, config.seed
        )

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            contexts = list(pool.map(build, windows))
    else:
        contexts = [build(w) for w in windows]
    logger.info(
        f"Built {len(contexts)} window contexts with "
        f"{sum(len(c.groups) for c in contexts)} sibling groups"
    )
    return contexts


def sample_window(
    context: WindowContext, config: WindowConfig, root_seed: int, epoch: int
) -> WindowSample:
    """Masks, geometry pairs and global-baseline pairs for one epoch."""
    index = context.window.index
    masked = select_masks(
        context.ids, config.mask_ratio, derive_rng(root_seed, "mask", epoch, index)
    )
    geo_pairs = sample_geo_pairs(
        context.window,
        context.distances,
        context.relations,
        config.n_random,
        config.n_hard,
        derive_seed(root_seed, "pairs", epoch, index),
        exclude=context.heldout,
    )
    global_pairs = sample_global_pairs(
        context.window,
        context.kinds,
        context.distances,
        context.relations,
        context.groups,
        config.n_global,
        derive_seed(root_seed, "global", epoch, index),
        config.global_buffer,
    )
    return WindowSample(
        masked=masked, geo_pairs=tuple(geo_pairs), global_pairs=tuple(global_pairs)
    )
