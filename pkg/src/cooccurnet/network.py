"""Co-occurrence frequencies and layered, target-centered community networks.

Construction is recursive breadth-first expansion: the target is the root on
layer 0; every identity sharing strictly more than ``threshold`` photos with a
member on layer L that is not already in the network joins layer L+1; the
expansion stops when a layer adds nobody (or ``max_layers`` is reached).  All
qualifying edges among members are kept, including edges within a layer, each
carrying its co-occurrence frequency and the shared photos as evidence.

``reachable_bruteforce`` answers the same membership/layer question by
exhaustive photo enumeration over the whole corpus (via networkx) and exists
as an independent oracle for the builder.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from itertools import combinations
from typing import Mapping

import networkx as nx

from .corpus import Corpus, Identity, LabelSource, PhotoId
from .errors import ParameterError, UnknownTargetError


@dataclass(frozen=True)
class BuildParams:
    threshold: int = 0
    max_layers: int | None = None
    label_source: LabelSource = LabelSource.TRUE

    def __post_init__(self):
        if self.threshold < 0:
            raise ParameterError(f"threshold must be >= 0, got {self.threshold}")
        if self.max_layers is not None and self.max_layers < 1:
            raise ParameterError(f"max_layers must be >= 1, got {self.max_layers}")


@dataclass(frozen=True)
class CooccurrenceDict:
    """Per-target co-occurrence counts over every other identity in the corpus.

    Zero-count identities are retained here (the dictionary enumerates the
    whole universe); graphs built from it keep only qualifying neighbors.
    """

    target: Identity
    freq: Mapping[Identity, int]
    evidence: Mapping[Identity, frozenset[PhotoId]]

    def neighbors_above(self, threshold: int) -> tuple[Identity, ...]:
        return tuple(sorted(k for k, f in self.freq.items() if f > threshold))


@dataclass(frozen=True)
class Edge:
    """Unordered member pair; ``a`` < ``b`` lexicographically."""

    a: Identity
    b: Identity
    frequency: int
    shared_photos: frozenset[PhotoId]
    strength: float | None = None

    def __post_init__(self):
        if self.a >= self.b:
            raise ParameterError(f"edge endpoints must satisfy a < b, got {self.a!r}, {self.b!r}")


@dataclass(frozen=True)
class CommunityGraph:
    root: Identity
    layer: Mapping[Identity, int]
    edges: tuple[Edge, ...]

    @property
    def members(self) -> frozenset[Identity]:
        return frozenset(self.layer)

    @property
    def n_members(self) -> int:
        return len(self.layer)

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    @property
    def depth(self) -> int:
        return max(self.layer.values())

    def with_edges(self, edges: tuple[Edge, ...]) -> "CommunityGraph":
        return replace(self, edges=edges)


def cooccurrence_frequencies(
    corpus: Corpus, target: Identity, label_source: LabelSource = LabelSource.TRUE
) -> CooccurrenceDict:
    """Count, for every other identity, the photos shared with the target."""
    target_photos = corpus.photos_of(target, label_source)
    if not target_photos:
        raise UnknownTargetError(
            f"target {target!r} appears in no photo under {label_source.value}"
        )
    evidence: dict[Identity, set[PhotoId]] = {}
    for photo in target_photos:
        for other in corpus.identities_in(photo, label_source):
            if other != target:
                evidence.setdefault(other, set()).add(photo)
    freq = {identity: 0 for identity in corpus.identities(label_source) if identity != target}
    freq.update({identity: len(photos) for identity, photos in evidence.items()})
    return CooccurrenceDict(
        target=target,
        freq=freq,
        evidence={identity: frozenset(photos) for identity, photos in evidence.items()},
    )


def _pair_photos(
    corpus: Corpus, u: Identity, v: Identity, label_source: LabelSource
) -> frozenset[PhotoId]:
    return corpus.photos_of(u, label_source) & corpus.photos_of(v, label_source)


def build_network(corpus: Corpus, target: Identity, params: BuildParams) -> CommunityGraph:
    """Recursive layered expansion from the target under the frequency threshold.

    Layer numbers equal shortest-path distance from the root in the graph of
    pairs sharing > threshold photos, so the result is independent of
    expansion order; expansion nevertheless proceeds in ascending identity
    order for reproducibility.
    """
    source = params.label_source
    if not corpus.photos_of(target, source):
        raise UnknownTargetError(f"target {target!r} appears in no photo under {source.value}")

    layer: dict[Identity, int] = {target: 0}
    frontier = [target]
    depth = 0
    while frontier and (params.max_layers is None or depth < params.max_layers):
        discovered: set[Identity] = set()
        for member in frontier:
            member_photos = corpus.photos_of(member, source)
            candidates: set[Identity] = set()
            for photo in member_photos:
                candidates |= corpus.identities_in(photo, source)
            for other in candidates:
                if other in layer or other in discovered or other == member:
                    continue
                if len(member_photos & corpus.photos_of(other, source)) > params.threshold:
                    discovered.add(other)
        depth += 1
        frontier = sorted(discovered)
        for identity in frontier:
            layer[identity] = depth

    edges = []
    for u, v in combinations(sorted(layer), 2):
        shared = _pair_photos(corpus, u, v, source)
        if len(shared) > params.threshold:
            assert abs(layer[u] - layer[v]) <= 1, "qualifying edge spans more than one layer"
            edges.append(Edge(a=u, b=v, frequency=len(shared), shared_photos=shared))
    return CommunityGraph(root=target, layer=layer, edges=tuple(edges))


def reachable_bruteforce(
    corpus: Corpus, target: Identity, params: BuildParams
) -> dict[Identity, int]:
    """Independent oracle: exhaustive pair counting plus breadth-first distances.

    Enumerates every photo of the corpus, accumulates pair co-occurrence
    counts, drops edges at or below the threshold and returns shortest-path
    distances from the target (capped at ``max_layers``).
    """
    source = params.label_source
    if not corpus.photos_of(target, source):
        raise UnknownTargetError(f"target {target!r} appears in no photo under {source.value}")
    counts: dict[tuple[Identity, Identity], int] = {}
    for photo in corpus.photos:
        for u, v in combinations(sorted(corpus.identities_in(photo, source)), 2):
            counts[(u, v)] = counts.get((u, v), 0) + 1
    graph = nx.Graph()
    graph.add_node(target)
    for (u, v), count in counts.items():
        if count > params.threshold:
            graph.add_edge(u, v)
    distances = nx.single_source_shortest_path_length(graph, target)
    if params.max_layers is not None:
        distances = {k: d for k, d in distances.items() if d <= params.max_layers}
    return dict(distances)
