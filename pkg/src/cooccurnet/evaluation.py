"""Evaluation of predicted networks and statistics over community sets.

Predicted networks (built from recognized labels) are scored against truth
networks (built from ground-truth labels at the same threshold) on their
member sets, root excluded: the root is an input, not a prediction.  Sweeps
micro-average tp/fp/fn across targets per threshold.  Community statistics
cover size histograms, per-size mean density and min/max/avg summaries.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .corpus import Corpus, Identity, LabelSource
from .errors import ConsistencyError, ParameterError, UndefinedDensityError, UnknownTargetError
from .network import BuildParams, CommunityGraph, build_network
from .recognition import RecognizerConfig, recognize


@dataclass(frozen=True)
class EvalReport:
    tp: int
    fp: int
    fn: int

    @property
    def precision(self) -> float:
        # No positive predictions means no wrong ones; vacuously perfect.
        return self.tp / (self.tp + self.fp) if self.tp + self.fp else 1.0

    @property
    def recall(self) -> float:
        return self.tp / (self.tp + self.fn) if self.tp + self.fn else 1.0


@dataclass(frozen=True)
class SweepResult:
    """Aggregate precision/recall per threshold, thresholds strictly increasing."""

    rows: tuple[tuple[int, float, float], ...]

    def to_csv(self) -> str:
        lines = ["threshold,precision,recall"]
        lines += [f"{t},{p:.4f},{r:.4f}" for t, p, r in self.rows]
        return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class CommunityRecord:
    roots: tuple[Identity, ...]
    size: int
    n_edges: int
    density: float | None


@dataclass(frozen=True)
class CommunityStats:
    size_histogram: Mapping[int, int]
    density_by_size: Mapping[int, float]
    records: tuple[CommunityRecord, ...]


@dataclass(frozen=True)
class Summary:
    minimum: float
    maximum: float
    average: float


def evaluate_network(predicted: CommunityGraph, truth: CommunityGraph) -> EvalReport:
    """Set comparison of predicted vs truth members, root excluded."""
    if predicted.root != truth.root:
        raise ConsistencyError(
            f"cannot compare networks with different roots: {predicted.root!r} vs {truth.root!r}"
        )
    return _evaluate_members(predicted.members - {predicted.root}, truth.members - {truth.root})


def _evaluate_members(predicted: frozenset[Identity], truth: frozenset[Identity]) -> EvalReport:
    tp = len(predicted & truth)
    return EvalReport(tp=tp, fp=len(predicted) - tp, fn=len(truth) - tp)


def aggregate_micro(reports: Iterable[EvalReport]) -> EvalReport:
    tp = fp = fn = 0
    for report in reports:
        tp += report.tp
        fp += report.fp
        fn += report.fn
    return EvalReport(tp=tp, fp=fp, fn=fn)


def aggregate_macro(reports: Sequence[EvalReport]) -> tuple[float, float]:
    """Unweighted mean precision and recall across per-target reports."""
    if not reports:
        raise ParameterError("cannot macro-average zero reports")
    n = len(reports)
    return (sum(r.precision for r in reports) / n, sum(r.recall for r in reports) / n)


def _members_or_root_only(corpus: Corpus, target: Identity, params: BuildParams) -> frozenset[Identity]:
    # A target the recognizer erased entirely yields an empty prediction,
    # not an error: the system found nobody.
    try:
        return build_network(corpus, target, params).members - {target}
    except UnknownTargetError:
        return frozenset()


def per_target_reports(
    truth_corpus: Corpus,
    predicted_corpus: Corpus,
    targets: Sequence[Identity],
    threshold: int,
    max_layers: int | None = None,
) -> list[tuple[Identity, EvalReport]]:
    """Evaluate one predicted network per target against its truth network."""
    truth_params = BuildParams(threshold, max_layers, LabelSource.TRUE)
    pred_params = BuildParams(threshold, max_layers, LabelSource.PREDICTED)
    reports = []
    for target in targets:
        truth_members = _members_or_root_only(truth_corpus, target, truth_params)
        pred_members = _members_or_root_only(predicted_corpus, target, pred_params)
        reports.append((target, _evaluate_members(pred_members, truth_members)))
    return reports


def threshold_sweep(
    corpus: Corpus,
    recognizer: RecognizerConfig,
    thresholds: Sequence[int],
    targets: Sequence[Identity],
    max_layers: int | None = None,
) -> SweepResult:
    """Micro-averaged precision/recall of predicted networks per threshold."""
    if not targets:
        raise ParameterError("threshold sweep requires at least one target")
    if list(thresholds) != sorted(set(thresholds)):
        raise ParameterError("thresholds must be strictly increasing")
    if any(t < 0 for t in thresholds):
        raise ParameterError("thresholds must be non-negative")
    recognized = recognize(corpus, recognizer)
    rows = []
    for threshold in thresholds:
        reports = [r for _, r in per_target_reports(corpus, recognized, targets, threshold, max_layers)]
        micro = aggregate_micro(reports)
        rows.append((threshold, micro.precision, micro.recall))
    return SweepResult(rows=tuple(rows))


def enumerate_communities_with_roots(
    corpus: Corpus, params: BuildParams, targets: Sequence[Identity]
) -> list[tuple[CommunityGraph, tuple[Identity, ...]]]:
    """Distinct communities (by member set) with every target that produced each.

    Targets absent under the label source are skipped; communities are sorted
    by (size descending, smallest member id).
    """
    by_members: dict[frozenset[Identity], tuple[CommunityGraph, list[Identity]]] = {}
    for target in sorted(set(targets)):
        if not corpus.photos_of(target, params.label_source):
            continue
        graph = build_network(corpus, target, params)
        entry = by_members.setdefault(graph.members, (graph, []))
        entry[1].append(target)
    ordered = sorted(
        by_members.values(), key=lambda entry: (-entry[0].n_members, min(entry[0].members))
    )
    return [(graph, tuple(roots)) for graph, roots in ordered]


def enumerate_communities(
    corpus: Corpus, params: BuildParams, targets: Sequence[Identity]
) -> list[CommunityGraph]:
    return [graph for graph, _ in enumerate_communities_with_roots(corpus, params, targets)]


def density(graph: CommunityGraph) -> float:
    """Edges present over edges possible, n(n-1)/2."""
    n = graph.n_members
    if n < 2:
        raise UndefinedDensityError(f"density is undefined for {n} member(s)")
    return graph.n_edges / (n * (n - 1) / 2)


def community_stats(
    communities: Sequence[CommunityGraph | tuple[CommunityGraph, tuple[Identity, ...]]],
) -> CommunityStats:
    """Histogram, per-size mean density and per-community records.

    Accepts plain graphs or (graph, roots) pairs from
    :func:`enumerate_communities_with_roots`.  Single-member communities are
    counted in the histogram but skipped for density, which they leave
    undefined.
    """
    histogram: dict[int, int] = {}
    densities: dict[int, list[float]] = {}
    records: list[CommunityRecord] = []
    for item in communities:
        graph, roots = item if isinstance(item, tuple) else (item, (item.root,))
        size = graph.n_members
        histogram[size] = histogram.get(size, 0) + 1
        value = density(graph) if size >= 2 else None
        if value is not None:
            densities.setdefault(size, []).append(value)
        records.append(
            CommunityRecord(roots=roots, size=size, n_edges=graph.n_edges, density=value)
        )
    density_by_size = {
        size: sum(values) / len(values) for size, values in sorted(densities.items())
    }
    return CommunityStats(
        size_histogram=dict(sorted(histogram.items())),
        density_by_size=density_by_size,
        records=tuple(records),
    )


def summary(values: Iterable[float]) -> Summary:
    """Min/max/average of any real-valued table (IDF tables, score tables...)."""
    data = list(values)
    if not data:
        raise ParameterError("cannot summarize zero values")
    return Summary(minimum=min(data), maximum=max(data), average=sum(data) / len(data))


def histogram_to_csv(stats: CommunityStats) -> str:
    lines = ["size,count"]
    lines += [f"{size},{count}" for size, count in stats.size_histogram.items()]
    return "\n".join(lines) + "\n"


def density_by_size_to_csv(stats: CommunityStats) -> str:
    lines = ["size,avg_density"]
    lines += [f"{size},{value:.6f}" for size, value in stats.density_by_size.items()]
    return "\n".join(lines) + "\n"
