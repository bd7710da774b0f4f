"""Contextual embeddings of target entities from a frozen encoder."""

import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Dict, List, Optional, Sequence

import numpy as np

from app.context.windows import build_index, nearest_members
from app.core.seeding import derive_rng
from app.encoders.geometry import encode_geometries
from app.encoders.semantic import SemanticEncoder, get_encoder
from app.geometry.relations import geometry_descriptors, min_distance
from app.models.params import ParamStore
from app.models.transformer import DualStreamTransformer
from app.schemas.config import ExperimentConfig
from app.schemas.context import SpatialWindow
from app.schemas.geoentity import Dataset
from app.schemas.report import ContextualEmbedding
from exceptions.exceptions import DataException

logger = logging.getLogger(__name__)


def check_ids(dataset: Dataset, ids: Sequence[int]) -> None:
    """Raise listing every id the dataset does not hold."""
    missing = sorted({_id for _id in ids if _id not in dataset})
    if missing:
        raise DataException(f"unknown entity ids: {missing}")


class ContextEmbedder:
    """Runs the frozen encoder over each target's fixed-radius neighborhood."""

    def __init__(
        self,
        params: ParamStore,
        config: ExperimentConfig,
        dataset: Dataset,
        encoder: Optional[SemanticEncoder] = None,
    ):
        """Index the dataset and wrap the parameters in an inference model."""
        self.config = config
        self.dataset = dataset
        self.model = DualStreamTransformer(params, config.model)
        self.encoder = encoder or get_encoder(
            config.seed, config.model.d_sem, config.model.codebook_rows
        )
        self.index = build_index(dataset.entities, config.window.size / 4.0)

    def neighborhood(self, target_id: int, radius: float) -> List[int]:
        """Ids within ``radius`` meters of the target, the target included.

        Like a pretraining window, the context holds at most ``member_cap``
        entities: the target and those nearest its centroid.
        """
        target = self.dataset.get(target_id).geometry
        others = [
            _id
            for _id in self.index.query_radius(target.bounds, radius)
            if _id != target_id
            and min_distance(self.dataset.get(_id).geometry, target) <= radius
        ]
        kept = nearest_members(
            others,
            self.dataset,
            geometry_descriptors(target).centroid,
            self.config.window.member_cap - 1,
        )
        return sorted([target_id, *kept])

    def random_neighborhood(self, target_id: int, radius: float) -> List[int]:
        """Target plus as many random entities as its true neighborhood holds."""
        size = len(self.neighborhood(target_id, radius)) - 1
        others = [e.id for e in self.dataset.entities if e.id != target_id]
        rng = derive_rng(self.config.seed, "random-context", target_id)
        picks = rng.choice(len(others), size=min(size, len(others)), replace=False)
        return sorted([target_id, *(others[k] for k in picks)])

    def embed(
        self,
        target_id: int,
        radius: float,
        mask_target: bool = False,
        random_context: bool = False,
    ) -> ContextualEmbedding:
        """Target rows of ``H_fused`` and ``H_sem`` in a window centered on it."""
        if random_context:
            members = self.random_neighborhood(target_id, radius)
        else:
            members = self.neighborhood(target_id, radius)
        entities = [self.dataset.get(_id) for _id in members]
        centroid = geometry_descriptors(self.dataset.get(target_id).geometry).centroid
        window = SpatialWindow.centered(centroid, self.config.window.size)
        row = members.index(target_id)
        out = self.model.forward_window(
            self.encoder.encode_many([e.tokens for e in entities]),
            encode_geometries([e.geometry for e in entities], window),
            masked_rows=(row,) if mask_target else (),
        )
        return ContextualEmbedding(
            id=target_id,
            h_fused=out.h_fused.data[row].tolist(),
            h_sem=out.h_sem.data[row].tolist(),
            radius=radius,
        )


def embed_entities(
    params: ParamStore,
    config: ExperimentConfig,
    dataset: Dataset,
    ids: Sequence[int],
    workers: int = 1,
) -> List[ContextualEmbedding]:
    """Embeddings of the given targets, in the order given."""
    check_ids(dataset, ids)
    probe = config.probe
    embedder = ContextEmbedder(params, config, dataset)

    def embed(_id: int) -> ContextualEmbedding:
        return embedder.embed(
            _id, probe.radius, probe.mask_target, probe.random_context
        )

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            embeddings = list(pool.map(embed, ids))
    else:
        embeddings = [embed(_id) for _id in ids]
    logger.info(f"Embedded {len(embeddings)} entities within {probe.radius} m")
    return embeddings


def semantic_features(
    dataset: Dataset, ids: Sequence[int], encoder: SemanticEncoder
) -> Dict[int, np.ndarray]:
    """Raw token embeddings, the context-free baseline features."""
    check_ids(dataset, ids)
    return {_id: encoder.encode(dataset.get(_id).tokens) for _id in ids}
