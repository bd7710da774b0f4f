"""Dataset Repository."""

import json
import logging
import re
from pathlib import Path
from typing import Iterable, List, Optional, Tuple

from pydantic import ValidationError

from app.geometry.projection import project_lonlat
from app.repositories.base import JsonLinesRepository, load_json_line
from app.schemas.geoentity import Dataset, Geoentity, GeoentityRecord, Geometry
from exceptions.exceptions import (
    DataException,
    GeometryValidationException,
    ParseException,
)

logger = logging.getLogger(__name__)

TOKEN_SPLIT = re.compile(r"[\W_]+")


def tokenize(tags: Iterable[str]) -> tuple[str, ...]:
    """Lowercase tags and split them on non-alphanumerics, keeping duplicates."""
    tokens: List[str] = []
    for tag in tags:
        tokens.extend(t for t in TOKEN_SPLIT.split(tag.lower()) if t)
    return tuple(tokens)


def _validation_detail(error: ValidationError) -> str:
    messages = []
    for err in error.errors():
        message = str(err.get("msg", ""))
        messages.append(message.removeprefix("Value error, "))
    return "; ".join(messages)


def record_to_entity(
    record: GeoentityRecord, line_number: int | None = None
) -> Geoentity:
    """Validate a raw record into a geoentity."""
    try:
        geometry = Geometry(kind=record.kind, coords=tuple(map(tuple, record.coords)))
    except ValidationError as e:
        detail = _validation_detail(e)
        prefix = f"line {line_number}: " if line_number is not None else ""
        raise GeometryValidationException(f"{prefix}{detail}") from e
    return Geoentity(
        id=record.id,
        parent_id=record.parent_id,
        tokens=tokenize(record.tags),
        geometry=geometry,
    )


def parse_geoentity_record(
    line: str,
    line_number: int | None = None,
    lonlat_origin: Optional[Tuple[float, float]] = None,
) -> Geoentity:
    """Parse one ingestion line into a validated geoentity.

    With ``lonlat_origin`` the coordinates are read as degrees and projected to
    meters around that origin before validation.
    """
    payload = load_json_line(line, line_number or 0)
    try:
        record = GeoentityRecord.model_validate(payload)
    except ValidationError as e:
        detail = _validation_detail(e)
        raise ParseException(f"malformed record: {detail}", line_number) from e
    if lonlat_origin is not None:
        try:
            record = project_lonlat([record], lonlat_origin)[0]
        except GeometryValidationException as e:
            prefix = f"line {line_number}: " if line_number is not None else ""
            raise GeometryValidationException(f"{prefix}{e.detail}") from e
    return record_to_entity(record, line_number)


def entity_to_record(entity: Geoentity) -> GeoentityRecord:
    """Serialize a geoentity back into the ingestion record."""
    return GeoentityRecord(
        id=entity.id,
        parent_id=entity.parent_id,
        kind=entity.kind,
        coords=[tuple(p) for p in entity.geometry.coords],
        tags=list(entity.tokens),
    )


class DatasetRepository(JsonLinesRepository[Geoentity]):
    """Dataset Repository Class."""

    def __init__(
        self,
        path: str | Path,
        lonlat_origin: Optional[Tuple[float, float]] = None,
    ):
        """Repository over one dataset file, optionally holding lon/lat records."""
        super().__init__(path)
        self.lonlat_origin = lonlat_origin

    def parse_line(self, line: str, line_number: int) -> Geoentity:
        """Parse one ingestion record."""
        return parse_geoentity_record(line, line_number, self.lonlat_origin)

    def dump_record(self, record: Geoentity) -> dict:
        """Serialize one geoentity."""
        return entity_to_record(record).model_dump(mode="json")

    @staticmethod
    def serialize(entity: Geoentity) -> str:
        """Single-line JSON form of an entity."""
        return json.dumps(entity_to_record(entity).model_dump(mode="json"))

    def load(self) -> Dataset:
        """Load and validate the whole dataset."""
        entities = self.get_all()
        if not entities:
            raise DataException(f"dataset {self.path} holds no entities")
        try:
            dataset = Dataset.from_entities(entities)
        except ValidationError as e:
            raise DataException(f"invalid dataset: {_validation_detail(e)}") from e
        logger.info(f"Loaded {len(dataset)} entities from {self.path}")
        return dataset

    def save(self, dataset: Dataset) -> int:
        """Write every entity of the dataset."""
        return self.write_all(dataset.entities)
