"""Training Log Repository."""

from app.repositories.base import JsonLinesRepository, validate_record
from app.schemas.report import EvaluationRecord, TrainingLogRecord


class TrainingLogRepository(JsonLinesRepository[TrainingLogRecord]):
    """Append-only per-batch loss log."""

    def parse_line(self, line: str, line_number: int) -> TrainingLogRecord:
        """Parse one log line."""
        return validate_record(TrainingLogRecord, line, line_number, "log record")


class EvaluationLogRepository(JsonLinesRepository[EvaluationRecord]):
    """Append-only held-out pair-head evaluations."""

    def parse_line(self, line: str, line_number: int) -> EvaluationRecord:
        """Parse one evaluation line."""
        return validate_record(EvaluationRecord, line, line_number, "evaluation record")
