"""Labeled seed derivation.

All randomness flows from one root seed. Subsystems derive their own stream by
hashing the root together with purpose labels, so any one of them can be re-seeded
without shifting the draws of the others.
"""

import hashlib

import numpy as np


def derive_seed(root_seed: int, *labels: object) -> int:
    """Derive a 63-bit seed from the root seed and purpose labels."""
    key = ":".join([str(int(root_seed)), *(str(label) for label in labels)])
    digest = hashlib.blake2b(key.encode("utf-8"), digest_size=8).digest()
    return int.from_bytes(digest, "big") >> 1


def derive_rng(root_seed: int, *labels: object) -> np.random.Generator:
    """Numpy generator seeded from the labeled derivation."""
    return np.random.default_rng(derive_seed(root_seed, *labels))
