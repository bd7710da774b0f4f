"""Probe Use Case."""

import logging
from pathlib import Path
from typing import Dict, Sequence

import numpy as np

from app.encoders.semantic import get_encoder
from app.probes.embedding import embed_entities, semantic_features
from app.probes.tasks import pool_roads, probe_classify, probe_regress
from app.repositories.base import write_json
from app.repositories.checkpoint import CheckpointRepository
from app.repositories.labels import LabelsRepository
from app.schemas.config import ExperimentConfig
from app.schemas.geoentity import Dataset
from app.schemas.report import ClassificationMetrics, RegressionMetrics
from app.use_cases.base import echo_config
from app.use_cases.embed import EmbedUseCase
from exceptions.exceptions import CustomException, DataException

logger = logging.getLogger(__name__)


class ProbeUseCase:
    """Probe Use Case Class."""

    def __init__(
        self,
        data_path: str | Path,
        labels_path: str | Path,
        checkpoint_path: str | Path,
        out_dir: str | Path,
    ):
        """Initialize with dataset, labels, frozen checkpoint and output dir."""
        self.out_dir = Path(out_dir)
        self.embed_use_case = EmbedUseCase(data_path, checkpoint_path)
        self.labels_repository = LabelsRepository(labels_path)
        self.checkpoint_repository = CheckpointRepository(checkpoint_path)

    def _features(
        self, config: ExperimentConfig, ids: Sequence[int], parts: Sequence[str]
    ) -> tuple[Dataset, Dict[int, np.ndarray], ExperimentConfig]:
        """Frozen contextual embeddings, or raw token embeddings as the baseline."""
        dataset, params, merged = self.embed_use_case.load(config)
        if merged.probe.features == "semantic":
            encoder = get_encoder(
                merged.seed, merged.model.d_sem, merged.model.codebook_rows
            )
            return dataset, semantic_features(dataset, ids, encoder), merged
        embeddings = embed_entities(
            params, merged, dataset, ids, workers=merged.train.workers
        )
        features = {
            e.id: np.concatenate([np.asarray(getattr(e, part)) for part in parts])
            for e in embeddings
        }
        return dataset, features, merged

    def _write(self, name: str, metrics, config: ExperimentConfig, digest: str):
        document = {**metrics.model_dump(mode="json"), "checkpoint_sha256": digest}
        write_json(self.out_dir / name, document)
        echo_config(self.out_dir, config)

    def _check_frozen(self, before: str) -> str:
        after = self.checkpoint_repository.fingerprint()
        if after != before:
            raise DataException("checkpoint changed while probing")
        return after

    def classify(self, config: ExperimentConfig) -> ClassificationMetrics:
        """Zone classification on ``[h_fused ; h_sem]`` of labeled polygons."""
        try:
            digest = self.checkpoint_repository.fingerprint()
            zones = self.labels_repository.zones()
            if not zones:
                raise DataException("labels hold no zone labels")
            _, features, merged = self._features(
                config, sorted(zones), ("h_fused", "h_sem")
            )
            metrics = probe_classify(features, zones, merged.probe, merged.seed)
            self._write(
                "probe_classify.json", metrics, merged, self._check_frozen(digest)
            )

        except CustomException as e:
            logger.error(f"Error occurred while probing zones: {e.detail}")
            raise

        return metrics

    def regress(self, config: ExperimentConfig) -> RegressionMetrics:
        """Road speed regression on pooled ``h_fused`` of labeled segments."""
        try:
            digest = self.checkpoint_repository.fingerprint()
            speeds = self.labels_repository.speeds()
            if not speeds:
                raise DataException("labels hold no speed labels")
            dataset, features, merged = self._features(
                config, sorted(speeds), ("h_fused",)
            )
            table = pool_roads(dataset, features, speeds)
            metrics = probe_regress(table, merged.probe, merged.seed)
            self._write(
                "probe_regress.json", metrics, merged, self._check_frozen(digest)
            )

        except CustomException as e:
            logger.error(f"Error occurred while probing speeds: {e.detail}")
            raise

        return metrics
