"""Predict target-centered social communities from photo co-occurrence data.

The pipeline: ingest a photo-annotation corpus, fill predicted identities
through a pluggable recognizer, expand a layered co-occurrence network around
a target, weight its edges with TF-IDF photo scores, and evaluate predicted
networks against ground truth.
"""

from .corpus import (
    AnnotationFormat,
    AugPlan,
    Corpus,
    FaceInstance,
    Identity,
    LabelSource,
    PhotoId,
    Quality,
    Split,
    augmentation_plan,
    clean,
    load_corpus,
    parse_annotations,
    save_corpus,
    serialize_corpus,
    stratified_split,
)
from .errors import (
    ConsistencyError,
    CooccurnetError,
    CoverageError,
    DomainError,
    InfiniteLossError,
    MissingLabelError,
    ParameterError,
    ParseError,
    StructuralError,
    UndefinedDensityError,
    UndefinedRateError,
    UnknownTargetError,
)
from .evaluation import (
    CommunityStats,
    EvalReport,
    SweepResult,
    Summary,
    aggregate_macro,
    aggregate_micro,
    community_stats,
    density,
    enumerate_communities,
    enumerate_communities_with_roots,
    evaluate_network,
    summary,
    threshold_sweep,
)
from .export import graph_from_json, graph_to_dot, graph_to_json
from .network import (
    BuildParams,
    CommunityGraph,
    CooccurrenceDict,
    Edge,
    build_network,
    cooccurrence_frequencies,
    reachable_bruteforce,
)
from .ranking import (
    GroupPhotoSet,
    IdfTable,
    PhotoScoreTable,
    group_photos,
    idf_table,
    photo_scores,
    relationship_strengths,
)
from .recognition import (
    PredictionRecord,
    RecognizerConfig,
    RecognizerMode,
    apply_predictions,
    cross_entropy,
    load_predictions,
    parse_predictions,
    recognize,
    serialize_predictions,
    softmax,
    top1_error,
)
from .synthetic import SynthParams, generate, partition_to_tsv

__version__ = "0.1.0"

__all__ = [
    "AnnotationFormat", "AugPlan", "Corpus", "FaceInstance", "Identity", "LabelSource",
    "PhotoId", "Quality", "Split", "augmentation_plan", "clean", "load_corpus",
    "parse_annotations", "save_corpus", "serialize_corpus", "stratified_split",
    "ConsistencyError", "CooccurnetError", "CoverageError", "DomainError",
    "InfiniteLossError", "MissingLabelError", "ParameterError", "ParseError",
    "StructuralError", "UndefinedDensityError", "UndefinedRateError", "UnknownTargetError",
    "CommunityStats", "EvalReport", "SweepResult", "Summary", "aggregate_macro",
    "aggregate_micro", "community_stats", "density", "enumerate_communities",
    "enumerate_communities_with_roots", "evaluate_network", "summary", "threshold_sweep",
    "graph_from_json", "graph_to_dot", "graph_to_json",
    "BuildParams", "CommunityGraph", "CooccurrenceDict", "Edge", "build_network",
    "cooccurrence_frequencies", "reachable_bruteforce",
    "GroupPhotoSet", "IdfTable", "PhotoScoreTable", "group_photos", "idf_table",
    "photo_scores", "relationship_strengths",
    "PredictionRecord", "RecognizerConfig", "RecognizerMode", "apply_predictions",
    "cross_entropy", "load_predictions", "parse_predictions", "recognize",
    "serialize_predictions", "softmax", "top1_error",
    "SynthParams", "generate", "partition_to_tsv",
]
