"""Deterministic synthetic corpora with planted communities.

Every group photo draws its members from exactly one planted community, and
each community's first photos lay down a random spanning tree of pair shots,
so the community is connected at threshold 0 by construction and the planted
partition is recoverable exactly, not just with high probability.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Mapping

from .corpus import Corpus, FaceInstance, Identity, PhotoId
from .errors import ParameterError


@dataclass(frozen=True)
class SynthParams:
    n_communities: int
    size_range: tuple[int, int]
    photos_range: tuple[int, int]
    persons_range: tuple[int, int] = (2, 3)
    solo_photo_rate: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.n_communities < 1:
            raise ParameterError(f"n_communities must be >= 1, got {self.n_communities}")
        for name, (lo, hi) in (
            ("size_range", self.size_range),
            ("photos_range", self.photos_range),
            ("persons_range", self.persons_range),
        ):
            if lo > hi or lo < 1:
                raise ParameterError(f"{name} must be a non-empty positive range, got ({lo}, {hi})")
        if self.size_range[0] < 2:
            raise ParameterError("communities need at least 2 members to co-occur")
        if self.persons_range[0] < 2:
            raise ParameterError("group photos need at least 2 persons")
        if self.persons_range[0] > self.size_range[0]:
            raise ParameterError(
                f"persons_range minimum {self.persons_range[0]} exceeds the smallest "
                f"possible community size {self.size_range[0]}"
            )
        if not 0.0 <= self.solo_photo_rate <= 1.0:
            raise ParameterError(f"solo_photo_rate must be in [0, 1], got {self.solo_photo_rate}")


def generate(params: SynthParams) -> tuple[Corpus, dict[Identity, int]]:
    """Build a corpus of planted communities; returns it with the planted partition.

    Deterministic in the seed: the same parameters always produce the same
    corpus byte for byte.
    """
    rng = random.Random(params.seed)
    instances: list[FaceInstance] = []
    partition: dict[Identity, int] = {}
    photo_counter = 0

    def emit_photo(members: list[Identity]) -> None:
        nonlocal photo_counter
        photo = PhotoId(photo=f"ph{photo_counter:06d}")
        photo_counter += 1
        for face_index, identity in enumerate(sorted(members)):
            instances.append(
                FaceInstance(photo=photo, face_index=face_index, true_identity=identity)
            )

    for c in range(params.n_communities):
        size = rng.randint(*params.size_range)
        members = [f"c{c:03d}m{j:02d}" for j in range(size)]
        for identity in members:
            partition[identity] = c

        # spanning tree of pair photos guarantees connectivity at threshold 0
        order = list(members)
        rng.shuffle(order)
        tree_photos = [[order[j], order[rng.randrange(j)]] for j in range(1, size)]
        n_photos = max(rng.randint(*params.photos_range), size - 1)
        group_photos = list(tree_photos)
        for _ in range(n_photos - len(tree_photos)):
            k = min(rng.randint(*params.persons_range), size)
            group_photos.append(rng.sample(members, k))
        for group in group_photos:
            emit_photo(group)
            if params.solo_photo_rate > 0.0 and rng.random() < params.solo_photo_rate:
                emit_photo([rng.choice(members)])

    return Corpus(instances), partition


def partition_to_tsv(partition: Mapping[Identity, int]) -> str:
    """Sidecar planted-partition file: identity, community index."""
    lines = ["identity\tcommunity_index"]
    lines += [f"{identity}\t{index}" for identity, index in sorted(partition.items())]
    return "\n".join(lines) + "\n"
