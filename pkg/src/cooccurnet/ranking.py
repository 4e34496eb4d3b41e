"""TF-IDF photo scoring and relationship-strength weighting.

The "documents" are group photos (two or more distinct identities); the
"words" are the identities themselves.  A person appears at most once per
photo, so the term frequency is identically 1 and every identity has a single
fixed IDF: log(|G| / f) where f counts the group photos the identity appears
in.  A photo's score is the mean IDF of its members; an edge's relationship
strength is the sum of the scores of the photos its endpoints share.

Scores form one global library computed over the full corpus, not per
community; changing the log base rescales everything by one positive constant
and therefore never changes a ranking.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping

from .corpus import Corpus, Identity, LabelSource, PhotoId
from .errors import ConsistencyError, ParameterError
from .network import CommunityGraph, Edge

DEFAULT_LOG_BASE = 10.0


@dataclass(frozen=True)
class GroupPhotoSet:
    """Group photos and their member identities under one label source."""

    members: Mapping[PhotoId, frozenset[Identity]]
    label_source: LabelSource = LabelSource.TRUE

    @property
    def size(self) -> int:
        return len(self.members)

    def __len__(self) -> int:
        return len(self.members)


@dataclass(frozen=True)
class IdfTable:
    idf: Mapping[Identity, float]
    log_base: float = DEFAULT_LOG_BASE


@dataclass(frozen=True)
class PhotoScoreTable:
    scores: Mapping[PhotoId, float]


def group_photos(corpus: Corpus, label_source: LabelSource = LabelSource.TRUE) -> GroupPhotoSet:
    """Photos containing at least two distinct identities under the label source."""
    members = {
        photo: identities
        for photo in corpus.photos
        if len(identities := corpus.identities_in(photo, label_source)) >= 2
    }
    return GroupPhotoSet(members=members, label_source=label_source)


def _check_log_base(log_base: float) -> None:
    if not math.isfinite(log_base) or log_base <= 0.0 or log_base == 1.0:
        raise ParameterError(f"log base must be positive and != 1, got {log_base}")


def idf_table(group_set: GroupPhotoSet, log_base: float = DEFAULT_LOG_BASE) -> IdfTable:
    """Fixed per-identity IDF values over the group-photo corpus.

    Only identities appearing in at least one group photo are scored; there is
    nothing to divide by for the rest.
    """
    _check_log_base(log_base)
    if group_set.size < 1:
        raise ParameterError("cannot build an IDF table from an empty group photo set")
    occurrences: dict[Identity, int] = {}
    for identities in group_set.members.values():
        for identity in identities:
            occurrences[identity] = occurrences.get(identity, 0) + 1
    total = group_set.size
    idf = {
        identity: math.log(total / count) / math.log(log_base)
        for identity, count in sorted(occurrences.items())
    }
    return IdfTable(idf=idf, log_base=log_base)


def photo_scores(group_set: GroupPhotoSet, idf: IdfTable) -> PhotoScoreTable:
    """Score each group photo as the average IDF of its members."""
    scores: dict[PhotoId, float] = {}
    for photo in sorted(group_set.members, key=lambda p: p.sort_key):
        identities = sorted(group_set.members[photo])
        missing = [i for i in identities if i not in idf.idf]
        if missing:
            raise ConsistencyError(
                f"photo {photo.display} contains identities without IDF entries: "
                + ", ".join(missing)
            )
        scores[photo] = sum(idf.idf[i] for i in identities) / len(identities)
    return PhotoScoreTable(scores=scores)


def relationship_strengths(graph: CommunityGraph, scores: PhotoScoreTable) -> CommunityGraph:
    """Weight every edge with the summed scores of its shared photos."""
    edges: list[Edge] = []
    for edge in graph.edges:
        strength = 0.0
        for photo in sorted(edge.shared_photos, key=lambda p: p.sort_key):
            if photo not in scores.scores:
                raise ConsistencyError(
                    f"shared photo {photo.display} of edge {edge.a}-{edge.b} has no score"
                )
            strength += scores.scores[photo]
        edges.append(Edge(edge.a, edge.b, edge.frequency, edge.shared_photos, strength))
    return graph.with_edges(tuple(edges))


def idf_to_tsv(table: IdfTable) -> str:
    lines = [f"{identity}\t{value:.6f}" for identity, value in sorted(table.idf.items())]
    return "\n".join(lines) + "\n"


def scores_to_tsv(table: PhotoScoreTable) -> str:
    ordered = sorted(table.scores.items(), key=lambda kv: kv[0].sort_key)
    lines = [f"{photo.display}\t{value:.6f}" for photo, value in ordered]
    return "\n".join(lines) + "\n"
