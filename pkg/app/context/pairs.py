"""Pairwise window geometry and pair sampling."""

from typing import Collection, List, Sequence, Set, Tuple

import numpy as np

from app.geometry.primitives import TOUCH_TOLERANCE
from app.geometry.relations import TopoRelation, classify_relation, min_distance
from app.schemas.context import PairKind, PairSample, SiblingGroup, SpatialWindow
from app.schemas.geoentity import Geoentity, GeometryKind

GLOBAL_KINDS = (GeometryKind.point, GeometryKind.polygon)


def pairwise_geometry(entities: Sequence[Geoentity]) -> Tuple[np.ndarray, np.ndarray]:
    """Symmetric distance matrix and relation-code matrix of a window."""
    n = len(entities)
    distances = np.zeros((n, n))
    relations = np.zeros((n, n), dtype=np.int64)
    for a in range(n):
        ga = entities[a].geometry
        for b in range(a + 1, n):
            gb = entities[b].geometry
            d = min_distance(ga, gb)
            distances[a, b] = distances[b, a] = d
            if d <= TOUCH_TOLERANCE:
                relations[a, b] = relations[b, a] = int(classify_relation(ga, gb))
    return distances, relations


def _pair(
    window: SpatialWindow, a: int, b: int, distances, relations, kind
) -> PairSample:
    return PairSample(
        i=window.members[a],
        j=window.members[b],
        distance=float(distances[a, b]),
        relation=TopoRelation(int(relations[a, b])),
        kind=kind,
    )


RowPair = Tuple[int, int]


def reserve_heldout_pairs(
    relations: np.ndarray, fraction: float, seed: int
) -> Tuple[RowPair, ...]:
    """Row pairs withheld from training, drawn per touching/disjoint stratum."""
    rng = np.random.default_rng(seed)
    rows, cols = np.triu_indices(relations.shape[0], 1)
    touching = relations[rows, cols] != TopoRelation.DISJOINT
    chosen: List[int] = []
    for pool in (np.flatnonzero(touching), np.flatnonzero(~touching)):
        size = int(fraction * pool.size)
        chosen.extend(rng.choice(pool, size=size, replace=False).tolist())
    return tuple(sorted((int(rows[k]), int(cols[k])) for k in chosen))


def heldout_samples(
    window: SpatialWindow,
    distances: np.ndarray,
    relations: np.ndarray,
    heldout: Sequence[RowPair],
) -> List[PairSample]:
    """Pair samples of the reserved row pairs."""
    return [
        _pair(
            window,
            a,
            b,
            distances,
            relations,
            PairKind.random
            if relations[a, b] == TopoRelation.DISJOINT
            else PairKind.hard,
        )
        for a, b in heldout
    ]


def sample_geo_pairs(
    window: SpatialWindow,
    distances: np.ndarray,
    relations: np.ndarray,
    n_random: int,
    n_hard: int,
    seed: int,
    exclude: Collection[RowPair] = (),
) -> List[PairSample]:
    """Hard (non-disjoint) pairs first, then random pairs from the rest.

    Row pairs in ``exclude`` are never drawn.
    """
    rng = np.random.default_rng(seed)
    rows, cols = np.triu_indices(len(window.members), 1)
    excluded = set(exclude)
    allowed = np.array(
        [(int(r), int(c)) not in excluded for r, c in zip(rows, cols)], dtype=bool
    )
    touching = relations[rows, cols] != TopoRelation.DISJOINT
    hard_pool = np.flatnonzero(touching & allowed)
    hard = rng.choice(hard_pool, size=min(n_hard, hard_pool.size), replace=False)
    remaining = np.setdiff1d(np.flatnonzero(allowed), hard)
    chosen = rng.choice(remaining, size=min(n_random, remaining.size), replace=False)
    return [
        _pair(window, rows[k], cols[k], distances, relations, PairKind.hard)
        for k in hard
    ] + [
        _pair(window, rows[k], cols[k], distances, relations, PairKind.random)
        for k in chosen
    ]


def sibling_pairs(groups: Sequence[SiblingGroup]) -> Set[Tuple[int, int]]:
    """Unordered id pairs that share at least one sibling group."""
    pairs = set()
    for group in groups:
        members = group.member_ids
        for x in range(len(members)):
            for y in range(x + 1, len(members)):
                pairs.add((min(members[x], members[y]), max(members[x], members[y])))
    return pairs


def sample_global_pairs(
    window: SpatialWindow,
    kinds: Sequence[GeometryKind],
    distances: np.ndarray,
    relations: np.ndarray,
    groups: Sequence[SiblingGroup],
    n_global: int,
    seed: int,
    buffer: float = 100.0,
) -> List[PairSample]:
    """Same-kind pairs within the buffer that are never siblings."""
    rng = np.random.default_rng(seed)
    excluded = sibling_pairs(groups)
    members = window.members
    candidates = []
    for a in range(len(members)):
        if kinds[a] not in GLOBAL_KINDS:
            continue
        for b in range(a + 1, len(members)):
            if kinds[b] != kinds[a] or distances[a, b] > buffer:
                continue
            if (min(members[a], members[b]), max(members[a], members[b])) in excluded:
                continue
            candidates.append((a, b))
    size = min(n_global, len(candidates))
    picks = rng.choice(len(candidates), size=size, replace=False)
    return [
        _pair(window, *candidates[k], distances, relations, PairKind.global_baseline)
        for k in picks
    ]
