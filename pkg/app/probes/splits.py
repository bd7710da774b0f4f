"""Seeded train/validation/test splits."""

from typing import Sequence, Tuple

import numpy as np

from app.core.seeding import derive_rng
from exceptions.exceptions import ProbeException

CLASSIFICATION_SPLIT = (0.5, 0.25, 0.25)
REGRESSION_SPLIT = (0.6, 0.2, 0.2)


def split_indices(
    n: int, fractions: Sequence[float], seed: int
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Shuffled train, validation and test positions; none of them empty."""
    if n < 3:
        raise ProbeException(f"need at least 3 samples to split, got {n}")
    order = derive_rng(seed, "probe-split").permutation(n)
    n_train = max(1, int(round(fractions[0] * n)))
    n_val = max(1, int(round(fractions[1] * n)))
    n_train = min(n_train, n - 2)
    n_val = min(n_val, n - n_train - 1)
    return (
        np.sort(order[:n_train]),
        np.sort(order[n_train : n_train + n_val]),
        np.sort(order[n_train + n_val :]),
    )
