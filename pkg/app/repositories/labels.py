"""Labels Repository."""

from typing import Dict, Iterable

from app.repositories.base import JsonLinesRepository, validate_record
from app.schemas.report import LabelRecord


class LabelsRepository(JsonLinesRepository[LabelRecord]):
    """Line-delimited ``{id, zone, speed}`` latent labels."""

    def parse_line(self, line: str, line_number: int) -> LabelRecord:
        """Parse one label record."""
        return validate_record(LabelRecord, line, line_number, "label record")

    def zones(self) -> Dict[int, int]:
        """Zone label per polygon id."""
        return {r.id: r.zone for r in self.iter_records() if r.zone is not None}

    def speeds(self) -> Dict[int, float]:
        """Speed label per road segment id."""
        return {r.id: r.speed for r in self.iter_records() if r.speed is not None}

    def save(self, records: Iterable[LabelRecord]) -> int:
        """Write all label records."""
        return self.write_all(records)
