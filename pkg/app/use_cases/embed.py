"""Embed Use Case."""

import logging
from pathlib import Path
from typing import List, Optional, Sequence, Tuple

from app.core.config import settings
from app.models.params import ParamStore
from app.probes.embedding import embed_entities
from app.repositories.checkpoint import CheckpointRepository
from app.repositories.dataset import DatasetRepository
from app.repositories.embedding import EmbeddingRepository
from app.schemas.config import ExperimentConfig
from app.schemas.geoentity import Dataset
from app.schemas.report import ContextualEmbedding
from app.use_cases.base import echo_config
from exceptions.exceptions import CustomException

logger = logging.getLogger(__name__)


def frozen_config(
    checkpoint_config: ExperimentConfig, config: ExperimentConfig
) -> ExperimentConfig:
    """Pretraining config with the probe and worker options of this run.

    The model, window size and seed must match pretraining, since the seed fixes
    the semantic codebook.
    """
    train = checkpoint_config.train.model_copy(
        update={"workers": config.train.workers}
    )
    return checkpoint_config.model_copy(
        update={"probe": config.probe, "train": train, "data": config.data}
    )


class EmbedUseCase:
    """Embed Use Case Class."""

    def __init__(
        self,
        data_path: str | Path,
        checkpoint_path: str | Path,
        out_dir: Optional[str | Path] = None,
    ):
        """Initialize with dataset, checkpoint and optional export repositories."""
        self.out_dir = Path(out_dir) if out_dir is not None else None
        self.dataset_repository = DatasetRepository(data_path)
        self.checkpoint_repository = CheckpointRepository(checkpoint_path)
        self.embedding_repository = (
            EmbeddingRepository(self.out_dir / settings.EMBEDDINGS_NAME)
            if self.out_dir is not None
            else None
        )

    def load(
        self, config: ExperimentConfig
    ) -> Tuple[Dataset, ParamStore, ExperimentConfig]:
        """Dataset, frozen parameters and the merged config."""
        self.dataset_repository.lonlat_origin = config.data.lonlat_origin
        dataset = self.dataset_repository.load()
        params, checkpoint_config, epoch = self.checkpoint_repository.load()
        logger.info(f"Loaded checkpoint from epoch {epoch}")
        return dataset, params, frozen_config(checkpoint_config, config)

    def embed(
        self, config: ExperimentConfig, ids: Optional[Sequence[int]] = None
    ) -> List[ContextualEmbedding]:
        """Embed the given ids, or every entity, and export them if configured."""
        try:
            dataset, params, merged = self.load(config)
            targets = list(ids) if ids is not None else [e.id for e in dataset.entities]
            embeddings = embed_entities(
                params, merged, dataset, targets, workers=merged.train.workers
            )
            if self.embedding_repository is not None:
                self.embedding_repository.write_all(embeddings)
                echo_config(self.out_dir, merged)

        except CustomException as e:
            logger.error(f"Error occurred while embedding entities: {e.detail}")
            raise

        return embeddings
