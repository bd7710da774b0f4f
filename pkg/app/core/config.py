"""Config."""

import json
import logging
import os
from pathlib import Path
from typing import Any, Dict, List, Optional

from dotenv import load_dotenv
from pydantic import ValidationError

from app.schemas.config import ExperimentConfig
from exceptions.exceptions import ConfigException

load_dotenv()

logger = logging.getLogger(__name__)


class Settings:
    """Settings Class."""

    SEED: int = int(os.getenv("NARA_SEED", "0"))
    OUTPUT_DIR: str = os.getenv("NARA_OUTPUT_DIR", "artifacts")
    LOG_LEVEL: str = os.getenv("NARA_LOG_LEVEL", "INFO")
    WORKERS: int = int(os.getenv("NARA_WORKERS", "1"))
    CONFIG_ECHO_NAME = "config.json"
    DATASET_NAME = "dataset.jsonl"
    LABELS_NAME = "labels.jsonl"
    CHECKPOINT_NAME = "checkpoint.json"
    TRAIN_LOG_NAME = "train_log.jsonl"
    EVAL_LOG_NAME = "eval_log.jsonl"
    EMBEDDINGS_NAME = "embeddings.jsonl"


settings = Settings()


def parse_override(raw: str) -> tuple[List[str], Any]:
    """Split a ``key.path=value`` override into its path and parsed value."""
    if "=" not in raw:
        raise ConfigException(f"override '{raw}' is not of the form key=value")
    key, value = raw.split("=", 1)
    path = [part for part in key.strip().split(".") if part]
    if not path:
        raise ConfigException(f"override '{raw}' has an empty key")
    try:
        parsed = json.loads(value)
    except json.JSONDecodeError:
        parsed = value
    return path, parsed


def apply_override(tree: Dict[str, Any], path: List[str], value: Any) -> None:
    """Set ``value`` at ``path`` inside a nested dictionary."""
    node = tree
    for part in path[:-1]:
        child = node.setdefault(part, {})
        if not isinstance(child, dict):
            raise ConfigException(f"'{part}' is not a config section")
        node = child
    node[path[-1]] = value


def load_experiment_config(
    path: Optional[str | Path] = None,
    overrides: Optional[List[str]] = None,
    seed: Optional[int] = None,
) -> ExperimentConfig:
    """Load the experiment config from file, overrides and seed flag."""
    tree: Dict[str, Any] = {}
    if path is not None:
        config_path = Path(path)
        if not config_path.is_file():
            raise ConfigException(f"config file not found: {config_path}")
        try:
            tree = json.loads(config_path.read_text(encoding="utf-8"))
        except json.JSONDecodeError as e:
            raise ConfigException(f"config file is not valid JSON: {e}") from e
        if not isinstance(tree, dict):
            raise ConfigException("config file must hold a JSON object")

    tree.setdefault("seed", settings.SEED)
    tree.setdefault("train", {}).setdefault("workers", settings.WORKERS)

    for raw in overrides or []:
        key_path, value = parse_override(raw)
        apply_override(tree, key_path, value)

    if seed is not None:
        tree["seed"] = seed

    try:
        config = ExperimentConfig.model_validate(tree)
    except ValidationError as e:
        errors = "; ".join(
            f"{'.'.join(str(p) for p in err['loc'])}: {err['msg']}"
            for err in e.errors()
        )
        logger.error(f"Invalid configuration: {errors}")
        raise ConfigException(f"invalid configuration: {errors}") from e

    return config
