"""Pluggable identity prediction plus the classifier math used around it.

Three recognizer modes fill the ``predicted_identity`` field of a corpus:

* ``oracle`` copies the ground-truth label (isolates graph behavior from
  classifier error),
* ``predictions_file`` applies labels produced by an external model,
* ``noise`` keeps the true label with probability ``p`` and otherwise draws a
  uniformly random wrong identity, from a per-face deterministic stream.

The module also provides the numeric utilities of the classifier itself:
softmax, cross-entropy and top-1 error.
"""

from __future__ import annotations

import hashlib
import math
import random
from dataclasses import dataclass, replace
from enum import Enum
from pathlib import Path
from typing import IO, Iterable, Sequence

import numpy as np

from .corpus import Corpus, FaceInstance, Identity, PhotoId, Quality
from .errors import (
    ConsistencyError,
    CoverageError,
    DomainError,
    InfiniteLossError,
    MissingLabelError,
    ParameterError,
    ParseError,
    UndefinedRateError,
)

PROB_SUM_TOL = 1e-6


class RecognizerMode(str, Enum):
    ORACLE = "oracle"
    PREDICTIONS_FILE = "predictions_file"
    NOISE = "noise"


@dataclass(frozen=True)
class RecognizerConfig:
    mode: RecognizerMode
    predictions_path: str | Path | None = None
    noise_accuracy: float | None = None
    seed: int = 0

    def __post_init__(self):
        if self.mode is RecognizerMode.PREDICTIONS_FILE and self.predictions_path is None:
            raise ParameterError("predictions_file mode requires predictions_path")
        if self.mode is RecognizerMode.NOISE:
            if self.noise_accuracy is None:
                raise ParameterError("noise mode requires noise_accuracy")
            if not 0.0 <= self.noise_accuracy <= 1.0:
                raise ParameterError(
                    f"noise_accuracy must be in [0, 1], got {self.noise_accuracy}"
                )


@dataclass(frozen=True)
class PredictionRecord:
    """One externally produced label, optionally with its probability vector."""

    photo: PhotoId
    face_index: int
    predicted: Identity
    probs: tuple[tuple[Identity, float], ...] | None = None


def softmax(logits: Sequence[float] | np.ndarray) -> np.ndarray:
    """Normalized exponentials of the logits, computed with max-subtraction."""
    x = np.asarray(logits, dtype=float)
    if x.ndim != 1 or x.size < 1:
        raise DomainError(f"logits must be a non-empty 1-d vector, got shape {x.shape}")
    if not np.all(np.isfinite(x)):
        raise DomainError("logits must be finite")
    shifted = x - np.max(x)
    exps = np.exp(shifted)
    return exps / exps.sum()


def check_prob_vector(probs: Sequence[float] | np.ndarray, tol: float = 1e-9) -> np.ndarray:
    """Validate a probability vector: entries in [0, 1], summing to 1 within tol."""
    p = np.asarray(probs, dtype=float)
    if p.ndim != 1 or p.size < 1:
        raise DomainError(f"probabilities must be a non-empty 1-d vector, got shape {p.shape}")
    if not np.all(np.isfinite(p)) or np.any(p < 0.0) or np.any(p > 1.0):
        raise DomainError("probabilities must lie in [0, 1]")
    if abs(float(p.sum()) - 1.0) > tol:
        raise DomainError(f"probabilities sum to {float(p.sum())!r}, not 1")
    return p


def cross_entropy(probs: Sequence[float] | np.ndarray, actual: int) -> float:
    """Negative natural log of the probability assigned to the actual class."""
    p = check_prob_vector(probs)
    if not 0 <= actual < p.size:
        raise DomainError(f"actual class index {actual} out of range [0, {p.size})")
    y = float(p[actual])
    if y == 0.0:
        raise InfiniteLossError(f"true class {actual} has probability 0; loss is infinite")
    return -math.log(y)


def top1_error(predictions: Sequence[PredictionRecord], corpus: Corpus) -> float:
    """Fraction of predictions whose label differs from the ground truth."""
    if not predictions:
        raise UndefinedRateError("cannot compute an error rate over zero predictions")
    wrong = 0
    for rec in predictions:
        if not corpus.has_face(rec.photo, rec.face_index):
            raise ConsistencyError(
                f"prediction references unknown face {rec.photo.display}#{rec.face_index}"
            )
        inst = corpus.instance(rec.photo, rec.face_index)
        if inst.true_identity is None:
            raise MissingLabelError(
                f"face {rec.photo.display}#{rec.face_index} has no true identity"
            )
        if rec.predicted != inst.true_identity:
            wrong += 1
    return wrong / len(predictions)


def _face_rng(seed: int, photo: PhotoId, face_index: int) -> random.Random:
    key = f"{seed}|{photo.album or ''}|{photo.photo}|{face_index}".encode("utf-8")
    digest = hashlib.blake2b(key, digest_size=8).digest()
    return random.Random(int.from_bytes(digest, "big"))


def recognize(corpus: Corpus, config: RecognizerConfig) -> Corpus:
    """Return a corpus whose usable instances carry a predicted identity.

    Deterministic given (corpus, config): noise mode derives an independent
    RNG stream per face from (seed, photo, face_index), so recognizing a
    sub-corpus agrees with recognizing the full corpus on shared faces as
    long as the identity universe matches.
    """
    if config.mode is RecognizerMode.PREDICTIONS_FILE:
        records = load_predictions(Path(config.predictions_path))
        return apply_predictions(corpus, records)

    universe = sorted(
        {
            inst.true_identity
            for inst in corpus
            if inst.quality is Quality.USABLE and inst.true_identity is not None
        }
    )
    position = {identity: i for i, identity in enumerate(universe)}

    out: list[FaceInstance] = []
    for inst in corpus:
        if inst.quality is not Quality.USABLE:
            out.append(inst)
            continue
        if inst.true_identity is None:
            raise MissingLabelError(
                f"cannot recognize unlabeled face {inst.photo.display}#{inst.face_index} "
                f"in {config.mode.value} mode"
            )
        if config.mode is RecognizerMode.ORACLE:
            out.append(replace(inst, predicted_identity=inst.true_identity))
            continue
        # noise mode
        rng = _face_rng(config.seed, inst.photo, inst.face_index)
        if rng.random() < config.noise_accuracy or len(universe) < 2:
            out.append(replace(inst, predicted_identity=inst.true_identity))
        else:
            draw = rng.randrange(len(universe) - 1)
            if draw >= position[inst.true_identity]:
                draw += 1
            out.append(replace(inst, predicted_identity=universe[draw]))
    return Corpus(out)


def apply_predictions(corpus: Corpus, records: Iterable[PredictionRecord]) -> Corpus:
    """Fill predicted identities from external records; every usable face must be covered."""
    by_key: dict[tuple[str, int], Identity] = {}
    for rec in records:
        key = (rec.photo.photo, rec.face_index)
        if key in by_key and by_key[key] != rec.predicted:
            raise ConsistencyError(
                f"conflicting predictions for face {rec.photo.photo}#{rec.face_index}"
            )
        by_key[key] = rec.predicted

    photo_strings: dict[str, set[str | None]] = {}
    for photo in corpus.photos:
        photo_strings.setdefault(photo.photo, set()).add(photo.album)

    out: list[FaceInstance] = []
    missing: list[str] = []
    for inst in corpus:
        if inst.quality is not Quality.USABLE:
            out.append(inst)
            continue
        key = (inst.photo.photo, inst.face_index)
        if key in by_key and len(photo_strings.get(inst.photo.photo, ())) > 1:
            raise ConsistencyError(
                f"photo id {inst.photo.photo!r} is ambiguous across albums; "
                "predictions files key faces by photo id alone"
            )
        if key not in by_key:
            missing.append(f"{inst.photo.display}#{inst.face_index}")
            continue
        out.append(replace(inst, predicted_identity=by_key[key]))
    if missing:
        shown = ", ".join(missing[:20])
        more = "" if len(missing) <= 20 else f" (and {len(missing) - 20} more)"
        raise CoverageError(f"predictions file misses {len(missing)} faces: {shown}{more}")
    return Corpus(out)


def load_predictions(path: str | Path) -> list[PredictionRecord]:
    with open(path, "rb") as fh:
        return parse_predictions(fh)


def parse_predictions(stream: IO) -> list[PredictionRecord]:
    """Parse the predictions TSV: photo_id, face_index, predicted_identity, [label:prob]*.

    When probability columns are present they must sum to 1 within 1e-6 and
    their argmax must agree with the stated predicted label.
    """
    raw = stream.read()
    text = raw.decode("utf-8") if isinstance(raw, bytes) else raw
    records: list[PredictionRecord] = []
    for line_no, line in enumerate(text.splitlines(), start=1):
        line = line.rstrip("\r")
        if not line or line.startswith("#"):
            continue
        fields = line.split("\t")
        if len(fields) < 3:
            raise ParseError("expected photo_id, face_index, predicted_identity", line=line_no)
        photo, face_index_s, predicted = fields[0], fields[1], fields[2]
        if not photo or not predicted:
            raise ParseError("photo_id and predicted_identity must be non-empty", line=line_no)
        try:
            face_index = int(face_index_s)
        except ValueError as exc:
            raise ParseError(f"non-integer face_index {face_index_s!r}", line=line_no) from exc
        probs = None
        if len(fields) > 3:
            probs = _parse_prob_columns(fields[3:], predicted, line_no)
        records.append(
            PredictionRecord(
                photo=PhotoId(photo=photo), face_index=face_index,
                predicted=predicted, probs=probs,
            )
        )
    return records


def _parse_prob_columns(
    columns: Sequence[str], predicted: Identity, line_no: int
) -> tuple[tuple[Identity, float], ...]:
    pairs: dict[Identity, float] = {}
    for col in columns:
        label, sep, value = col.rpartition(":")
        if not sep or not label:
            raise ParseError(f"malformed probability column {col!r}", line=line_no)
        try:
            prob = float(value)
        except ValueError as exc:
            raise ParseError(f"non-numeric probability in {col!r}", line=line_no) from exc
        if label in pairs:
            raise ParseError(f"duplicate probability label {label!r}", line=line_no)
        pairs[label] = prob
    values = list(pairs.values())
    if any(not math.isfinite(v) or v < 0.0 or v > 1.0 for v in values):
        raise ParseError("probabilities must lie in [0, 1]", line=line_no)
    total = sum(values)
    if abs(total - 1.0) > PROB_SUM_TOL:
        raise ParseError(f"probabilities sum to {total!r}, not 1 +- {PROB_SUM_TOL}", line=line_no)
    best = max(pairs.values())
    if pairs.get(predicted, -1.0) < best:
        raise ParseError(
            f"argmax of probabilities disagrees with predicted label {predicted!r}",
            line=line_no,
        )
    return tuple(sorted(pairs.items()))


def serialize_predictions(records: Iterable[PredictionRecord]) -> str:
    """Write prediction records in the predictions TSV format (canonical order)."""
    lines = []
    ordered = sorted(records, key=lambda r: (r.photo.sort_key, r.face_index))
    for rec in ordered:
        row = [rec.photo.photo, str(rec.face_index), rec.predicted]
        if rec.probs is not None:
            # full float precision so the written vector still sums to 1 within tolerance
            row.extend(f"{label}:{prob!r}" for label, prob in rec.probs)
        lines.append("\t".join(row))
    return "\n".join(lines) + "\n"
