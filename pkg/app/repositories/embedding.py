"""Embedding Repository."""

from typing import Dict

import numpy as np

from app.repositories.base import JsonLinesRepository, validate_record
from app.schemas.report import ContextualEmbedding


class EmbeddingRepository(JsonLinesRepository[ContextualEmbedding]):
    """Line-delimited ``{id, h_fused, h_sem}`` embedding export."""

    def parse_line(self, line: str, line_number: int) -> ContextualEmbedding:
        """Parse one exported embedding."""
        return validate_record(ContextualEmbedding, line, line_number, "embedding")

    def dump_record(self, record: ContextualEmbedding) -> dict:
        """Serialize without the radius, which lives in the config echo."""
        return record.model_dump(mode="json", include={"id", "h_fused", "h_sem"})

    def as_arrays(self) -> Dict[int, np.ndarray]:
        """``[h_fused ; h_sem]`` per id."""
        return {
            e.id: np.concatenate([np.asarray(e.h_fused), np.asarray(e.h_sem)])
            for e in self.iter_records()
        }
