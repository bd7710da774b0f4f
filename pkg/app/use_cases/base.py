"""Shared helpers of the use cases."""

from pathlib import Path

from app.core.config import settings
from app.repositories.base import write_json
from app.schemas.config import ExperimentConfig


def echo_config(out_dir: str | Path, config: ExperimentConfig) -> Path:
    """Copy the resolved config into an output directory."""
    return write_json(
        Path(out_dir) / settings.CONFIG_ECHO_NAME, config.model_dump(mode="json")
    )
