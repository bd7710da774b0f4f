"""Pretrain Use Case."""

import logging
from pathlib import Path

from app.context.builder import build_contexts
from app.core.config import settings
from app.models.params import init_params
from app.repositories.checkpoint import CheckpointRepository
from app.repositories.dataset import DatasetRepository
from app.repositories.training_log import (
    EvaluationLogRepository,
    TrainingLogRepository,
)
from app.schemas.config import ExperimentConfig
from app.training.trainer import Trainer, TrainingHistory
from app.use_cases.base import echo_config
from exceptions.exceptions import CustomException

logger = logging.getLogger(__name__)


class PretrainUseCase:
    """Pretrain Use Case Class."""

    def __init__(self, data_path: str | Path, out_dir: str | Path):
        """Initialize with the dataset and the run's output repositories."""
        self.out_dir = Path(out_dir)
        self.dataset_repository = DatasetRepository(data_path)
        self.checkpoint_repository = CheckpointRepository(
            self.out_dir / settings.CHECKPOINT_NAME
        )
        self.log_repository = TrainingLogRepository(
            self.out_dir / settings.TRAIN_LOG_NAME
        )
        self.evaluation_repository = EvaluationLogRepository(
            self.out_dir / settings.EVAL_LOG_NAME
        )

    def pretrain(self, config: ExperimentConfig) -> TrainingHistory:
        """Build window contexts, train and write checkpoint and logs."""
        try:
            self.dataset_repository.lonlat_origin = config.data.lonlat_origin
            dataset = self.dataset_repository.load()
            contexts = build_contexts(dataset, config, workers=config.train.workers)
            params = init_params(config.model, config.seed)
            echo_config(self.out_dir, config)
            self.log_repository.reset()
            self.evaluation_repository.reset()
            trainer = Trainer(
                config,
                contexts,
                params,
                log_repository=self.log_repository,
                evaluation_repository=self.evaluation_repository,
                checkpoint_repository=self.checkpoint_repository,
            )
            history = trainer.fit()

        except CustomException as e:
            logger.error(f"Error occurred while pretraining: {e.detail}")
            raise

        return history
