"""Synth Use Case."""

import logging
from pathlib import Path

from app.core.config import settings
from app.repositories.dataset import DatasetRepository
from app.repositories.labels import LabelsRepository
from app.schemas.config import ExperimentConfig
from app.synthcity.generator import SyntheticCity, generate_city
from app.use_cases.base import echo_config
from exceptions.exceptions import CustomException

logger = logging.getLogger(__name__)


class SynthUseCase:
    """Synth Use Case Class."""

    def __init__(self, out_dir: str | Path):
        """Initialize with the output directory and its repositories."""
        self.out_dir = Path(out_dir)
        dataset_path = self.out_dir / settings.DATASET_NAME
        self.dataset_repository = DatasetRepository(dataset_path)
        self.labels_repository = LabelsRepository(self.out_dir / settings.LABELS_NAME)

    def generate(self, config: ExperimentConfig) -> SyntheticCity:
        """Generate the city and write dataset, labels and config."""
        try:
            city = generate_city(config.city, config.seed)
            self.dataset_repository.save(city.dataset)
            self.labels_repository.save(city.labels)
            echo_config(self.out_dir, config)

        except CustomException as e:
            logger.error(f"Error occurred while generating the city: {e.detail}")
            raise

        return city
