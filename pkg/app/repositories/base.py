"""Base Repository."""

import json
import logging
from pathlib import Path
from typing import Any, Dict, Generic, Iterable, Iterator, List, Type, TypeVar

from pydantic import BaseModel, ValidationError

from exceptions.exceptions import DataException, ParseException

logger = logging.getLogger(__name__)

RecordType = TypeVar("RecordType")
ModelType = TypeVar("ModelType", bound=BaseModel)


class JsonLinesRepository(Generic[RecordType]):
    """Base Repository for line-delimited JSON artifacts."""

    def __init__(self, path: str | Path):
        """Repository object bound to one file.

        **Parameters**

        * `path`: Location of the line-delimited JSON file
        """
        self.path = Path(path)

    def parse_line(self, line: str, line_number: int) -> RecordType:
        """Parse one non-empty line into a record."""
        raise NotImplementedError

    def dump_record(self, record: RecordType) -> Dict[str, Any]:
        """Serialize one record to a JSON-compatible dictionary."""
        if isinstance(record, BaseModel):
            return record.model_dump(mode="json")
        return record  # type: ignore[return-value]

    def iter_records(self) -> Iterator[RecordType]:
        """Iterate over the parsed records of the file."""
        if not self.path.is_file():
            raise DataException(f"file not found: {self.path}")
        with self.path.open("r", encoding="utf-8") as handle:
            for line_number, line in enumerate(handle, start=1):
                if line.strip():
                    yield self.parse_line(line, line_number)

    def get_all(self) -> List[RecordType]:
        """Retrieve all records."""
        return list(self.iter_records())

    def write_all(self, records: Iterable[RecordType]) -> int:
        """Replace the file with the given records."""
        self.path.parent.mkdir(parents=True, exist_ok=True)
        count = 0
        with self.path.open("w", encoding="utf-8") as handle:
            for record in records:
                handle.write(json.dumps(self.dump_record(record)) + "\n")
                count += 1
        logger.info(f"Wrote {count} records to {self.path}")
        return count

    def reset(self) -> None:
        """Truncate the file, creating it if needed."""
        self.path.parent.mkdir(parents=True, exist_ok=True)
        self.path.write_text("", encoding="utf-8")

    def append(self, record: RecordType) -> None:
        """Append one record."""
        self.path.parent.mkdir(parents=True, exist_ok=True)
        with self.path.open("a", encoding="utf-8") as handle:
            handle.write(json.dumps(self.dump_record(record)) + "\n")


def load_json_line(line: str, line_number: int) -> Dict[str, Any]:
    """Decode one JSON object line with line context on failure."""
    try:
        value = json.loads(line)
    except json.JSONDecodeError as e:
        raise ParseException(f"invalid JSON: {e.msg}", line_number) from e
    if not isinstance(value, dict):
        raise ParseException("record must be a JSON object", line_number)
    return value


def write_json(path: str | Path, document: Any) -> Path:
    """Write a single JSON document."""
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    target.write_text(json.dumps(document, indent=2), encoding="utf-8")
    return target


def read_json(path: str | Path) -> Any:
    """Read a single JSON document."""
    source = Path(path)
    if not source.is_file():
        raise DataException(f"file not found: {source}")
    try:
        return json.loads(source.read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise ParseException(f"{source} is not valid JSON: {e.msg}") from e


def validate_record(
    model: Type[ModelType], line: str, line_number: int, label: str
) -> ModelType:
    """Decode one JSON line and validate it against a schema."""
    payload = load_json_line(line, line_number)
    try:
        return model.model_validate(payload)
    except ValidationError as e:
        detail = e.errors()[0]["msg"]
        raise ParseException(f"malformed {label}: {detail}", line_number) from e
