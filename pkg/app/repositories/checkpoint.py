"""Checkpoint Repository."""

import hashlib
import logging
from pathlib import Path
from typing import Tuple

from pydantic import ValidationError

from app.models.params import ParamStore, parameter_shapes
from app.repositories.base import read_json, write_json
from app.schemas.config import ExperimentConfig
from exceptions.exceptions import DataException

logger = logging.getLogger(__name__)


class CheckpointRepository:
    """Single-document JSON checkpoints of parameters and the run config."""

    def __init__(self, path: str | Path):
        """Repository object bound to one checkpoint file."""
        self.path = Path(path)

    def save(self, params: ParamStore, config: ExperimentConfig, epoch: int) -> Path:
        """Write parameters with the config and seed that produced them."""
        document = {
            "epoch": epoch,
            "seed": config.seed,
            "config": config.model_dump(mode="json"),
            "params": params.to_document(),
        }
        write_json(self.path, document)
        logger.info(f"Saved checkpoint for epoch {epoch} to {self.path}")
        return self.path

    def load(self) -> Tuple[ParamStore, ExperimentConfig, int]:
        """Parameters, config and epoch, validated against the model shapes."""
        document = read_json(self.path)
        if not isinstance(document, dict) or "params" not in document:
            raise DataException(f"{self.path} is not a checkpoint")
        try:
            config = ExperimentConfig.model_validate(document.get("config", {}))
        except ValidationError as e:
            raise DataException(f"checkpoint config is invalid: {e}") from e
        params = ParamStore.from_document(
            document["params"], parameter_shapes(config.model)
        )
        return params, config, int(document.get("epoch", 0))

    def fingerprint(self) -> str:
        """SHA-256 of the checkpoint file."""
        if not self.path.is_file():
            raise DataException(f"file not found: {self.path}")
        return hashlib.sha256(self.path.read_bytes()).hexdigest()
