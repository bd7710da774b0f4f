"""Hashed-codebook bag-of-tokens semantic encoder."""

import logging
from functools import lru_cache
from typing import Dict, Iterable, Sequence, Tuple

import numpy as np

from app.core.seeding import derive_rng
from exceptions.exceptions import NumericException

logger = logging.getLogger(__name__)

FNV_OFFSET_BASIS = 14695981039346656037
FNV_PRIME = 1099511628211
MASK_64 = (1 << 64) - 1
EMPTY_TOKEN = "<empty>"


def fnv1a_64(text: str) -> int:
    """64-bit FNV-1a hash of the UTF-8 bytes of ``text``."""
    value = FNV_OFFSET_BASIS
    for byte in text.encode("utf-8"):
        value ^= byte
        value = (value * FNV_PRIME) & MASK_64
    return value


class SemanticEncoder:
    """Sum of codebook rows selected by token hashes, L2-normalized."""

    def __init__(self, dim: int = 64, rows: int = 4096, seed: int = 0):
        """Draw the Gaussian codebook from the seed."""
        self.dim = dim
        self.rows = rows
        self.seed = seed
        self.codebook = derive_rng(seed, "codebook").standard_normal((rows, dim))
        self._cache: Dict[Tuple[str, ...], np.ndarray] = {}

    def row(self, token: str) -> int:
        """Codebook row of a token."""
        return fnv1a_64(token) % self.rows

    def encode(self, tokens: Iterable[str]) -> np.ndarray:
        """Unit-norm embedding of a token multiset."""
        key = tuple(sorted(tokens)) or (EMPTY_TOKEN,)
        cached = self._cache.get(key)
        if cached is not None:
            return cached
        vector = np.zeros(self.dim)
        for token in key:
            vector = vector + self.codebook[self.row(token)]
        norm = float(np.linalg.norm(vector))
        if norm == 0.0:
            raise NumericException(f"token multiset {key} encodes to the zero vector")
        vector = vector / norm
        vector.setflags(write=False)
        self._cache[key] = vector
        return vector

    def encode_many(self, token_sets: Sequence[Iterable[str]]) -> np.ndarray:
        """``(n, dim)`` matrix of embeddings."""
        if not token_sets:
            return np.empty((0, self.dim))
        return np.stack([self.encode(tokens) for tokens in token_sets])


@lru_cache(maxsize=8)
def get_encoder(seed: int, dim: int = 64, rows: int = 4096) -> SemanticEncoder:
    """Shared encoder per codebook configuration."""
    logger.debug(f"Building semantic codebook {rows}x{dim} for seed {seed}")
    return SemanticEncoder(dim=dim, rows=rows, seed=seed)


def encode_semantic(
    tokens: Iterable[str], codebook_seed: int, dim: int = 64, rows: int = 4096
) -> np.ndarray:
    """Semantic embedding of a token multiset."""
    return get_encoder(codebook_seed, dim, rows).encode(tokens)
