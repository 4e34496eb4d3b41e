"""Photo-annotation corpus: domain model, ingestion and metadata-level preprocessing.

The corpus is the single source of truth for everything downstream: each row is
one face in one photo, carrying an optional ground-truth identity, an optional
predicted identity, a quality flag and a train/test split flag.  A person can
appear at most once per photo, so per-photo identity collections are sets.

Corpora are immutable after construction and safe to share across threads;
every operation here is a pure function of its inputs (plus an explicit seed).
"""

from __future__ import annotations

import hashlib
import io
import logging
import random
from dataclasses import dataclass, field, replace
from enum import Enum
from pathlib import Path
from typing import IO, Iterable, Iterator, Mapping

from .errors import MissingLabelError, ParameterError, ParseError, StructuralError

logger = logging.getLogger(__name__)

# Identity labels are opaque non-empty strings compared by exact equality;
# lexicographic order is used wherever a canonical ordering is needed.
Identity = str


class Quality(str, Enum):
    USABLE = "usable"
    REJECTED = "rejected"


class Split(str, Enum):
    TRAIN = "train"
    TEST = "test"
    UNASSIGNED = "unassigned"


class LabelSource(str, Enum):
    """Which per-face label a graph/ranking operation should read."""

    TRUE = "true_labels"
    PREDICTED = "predicted_labels"


class AnnotationFormat(str, Enum):
    GENERIC_TSV = "generic_tsv"
    PIPA_INDEX = "pipa_index"


@dataclass(frozen=True)
class PhotoId:
    """A photo, optionally qualified by the album it belongs to.

    The (album, photo) pair is unique within a corpus; the album plays no
    algorithmic role and is carried as provenance only.
    """

    photo: str
    album: str | None = None

    def __post_init__(self):
        if not self.photo:
            raise StructuralError("photo id must be a non-empty string")

    @property
    def sort_key(self) -> tuple[str, str]:
        return (self.photo, self.album or "")

    @property
    def display(self) -> str:
        """Single-string form used in exported artifacts."""
        return f"{self.album}/{self.photo}" if self.album else self.photo


@dataclass(frozen=True)
class FaceInstance:
    """One annotated face: a photo, a position index, labels and flags."""

    photo: PhotoId
    face_index: int
    true_identity: Identity | None = None
    predicted_identity: Identity | None = None
    bbox: tuple[int, int, int, int] | None = None  # (x, y, w, h) in pixels
    quality: Quality = Quality.USABLE
    split: Split = Split.UNASSIGNED

    def __post_init__(self):
        if self.face_index < 0:
            raise StructuralError(f"face_index must be >= 0, got {self.face_index}")
        for label in (self.true_identity, self.predicted_identity):
            if label is not None and not label:
                raise StructuralError("identity labels must be non-empty strings")
        if self.bbox is not None:
            _, _, w, h = self.bbox
            if w <= 0 or h <= 0:
                raise StructuralError(f"bbox must have positive width/height, got {self.bbox}")

    @property
    def key(self) -> tuple[PhotoId, int]:
        return (self.photo, self.face_index)


def _canonical_order(instances: Iterable[FaceInstance]) -> tuple[FaceInstance, ...]:
    return tuple(sorted(instances, key=lambda f: (f.photo.sort_key, f.face_index)))


class Corpus:
    """Immutable collection of face instances with derived lookup indices."""

    def __init__(self, instances: Iterable[FaceInstance] = ()):
        self._instances = _canonical_order(instances)
        self._by_face: dict[tuple[PhotoId, int], FaceInstance] = {}
        seen_true: set[tuple[PhotoId, Identity]] = set()
        for inst in self._instances:
            if inst.key in self._by_face:
                raise StructuralError(
                    f"duplicate face_index {inst.face_index} in photo {inst.photo.display}"
                )
            self._by_face[inst.key] = inst
            if inst.true_identity is not None:
                pair = (inst.photo, inst.true_identity)
                if pair in seen_true:
                    raise StructuralError(
                        f"identity {inst.true_identity!r} appears twice in photo "
                        f"{inst.photo.display}; a person appears at most once per photo"
                    )
                seen_true.add(pair)
        self._photo_members = {
            LabelSource.TRUE: self._index_photos(LabelSource.TRUE),
            LabelSource.PREDICTED: self._index_photos(LabelSource.PREDICTED),
        }
        self._identity_photos = {
            source: self._invert(index) for source, index in self._photo_members.items()
        }

    def _label(self, inst: FaceInstance, source: LabelSource) -> Identity | None:
        return inst.true_identity if source is LabelSource.TRUE else inst.predicted_identity

    def _index_photos(self, source: LabelSource) -> dict[PhotoId, frozenset[Identity]]:
        acc: dict[PhotoId, set[Identity]] = {}
        for inst in self._instances:
            acc.setdefault(inst.photo, set())
            label = self._label(inst, source)
            if label is not None:
                acc[inst.photo].add(label)
        return {p: frozenset(s) for p, s in acc.items()}

    @staticmethod
    def _invert(index: Mapping[PhotoId, frozenset[Identity]]) -> dict[Identity, frozenset[PhotoId]]:
        acc: dict[Identity, set[PhotoId]] = {}
        for photo, members in index.items():
            for identity in members:
                acc.setdefault(identity, set()).add(photo)
        return {i: frozenset(s) for i, s in acc.items()}

    # -- read-only views -------------------------------------------------

    @property
    def instances(self) -> tuple[FaceInstance, ...]:
        return self._instances

    @property
    def photos(self) -> tuple[PhotoId, ...]:
        return tuple(sorted(self._photo_members[LabelSource.TRUE], key=lambda p: p.sort_key))

    def identities(self, source: LabelSource = LabelSource.TRUE) -> tuple[Identity, ...]:
        return tuple(sorted(self._identity_photos[source]))

    def photos_of(self, identity: Identity, source: LabelSource = LabelSource.TRUE) -> frozenset[PhotoId]:
        return self._identity_photos[source].get(identity, frozenset())

    def identities_in(self, photo: PhotoId, source: LabelSource = LabelSource.TRUE) -> frozenset[Identity]:
        return self._photo_members[source].get(photo, frozenset())

    def instance(self, photo: PhotoId, face_index: int) -> FaceInstance:
        return self._by_face[(photo, face_index)]

    def has_face(self, photo: PhotoId, face_index: int) -> bool:
        return (photo, face_index) in self._by_face

    def __len__(self) -> int:
        return len(self._instances)

    def __iter__(self) -> Iterator[FaceInstance]:
        return iter(self._instances)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Corpus):
            return NotImplemented
        return self._instances == other._instances

    def __repr__(self) -> str:
        return (
            f"Corpus({len(self._instances)} instances, {len(self._photo_members[LabelSource.TRUE])} "
            f"photos, {len(self._identity_photos[LabelSource.TRUE])} identities)"
        )


@dataclass(frozen=True)
class AugPlan:
    """Per-class augmentation counts needed to reach a minimum class size.

    Counts and suggested transform tags only; no pixels are synthesized here.
    """

    per_class: Mapping[Identity, int]
    transforms: Mapping[Identity, tuple[str, ...]] = field(default_factory=dict)
    min_per_class: int = 0

    @property
    def total_augmented(self) -> int:
        return sum(self.per_class.values())


_TRANSFORM_CYCLE = ("rotate", "flip", "scale")

_GENERIC_COLUMNS = ("photo_id", "identity", "album", "x", "y", "w", "h", "quality", "split")

_PIPA_SPLIT_MAP = {
    "1": Split.TRAIN, "train": Split.TRAIN,
    "2": Split.TRAIN, "val": Split.TRAIN,
    "3": Split.TEST, "test": Split.TEST,
    "4": Split.UNASSIGNED, "leftover": Split.UNASSIGNED,
}


def _as_text(stream: IO) -> IO[str]:
    first = stream.read(0)
    if isinstance(first, bytes):
        return io.TextIOWrapper(stream, encoding="utf-8")
    return stream


def parse_annotations(stream: IO, format: AnnotationFormat = AnnotationFormat.GENERIC_TSV) -> Corpus:
    """Parse an annotation file into a Corpus.

    Duplicate (photo, identity) rows collapse to the first occurrence; the
    number of collapsed rows is logged as a warning.  Face indices are
    assigned per photo in order of first appearance, which makes
    parse -> serialize -> parse the identity.
    """
    if format is AnnotationFormat.GENERIC_TSV:
        rows = _parse_generic_tsv(_as_text(stream))
    elif format is AnnotationFormat.PIPA_INDEX:
        rows = _parse_pipa_index(_as_text(stream))
    else:
        raise ParameterError(f"unknown annotation format: {format!r}")

    instances: list[FaceInstance] = []
    next_index: dict[PhotoId, int] = {}
    seen: dict[tuple[PhotoId, Identity | None], int] = {}
    duplicates = 0
    for line_no, photo, identity, album, bbox, quality, split in rows:
        pid = PhotoId(photo=photo, album=album)
        if identity is not None and (pid, identity) in seen:
            duplicates += 1
            continue
        index = next_index.get(pid, 0)
        next_index[pid] = index + 1
        if identity is not None:
            seen[(pid, identity)] = line_no
        try:
            instances.append(
                FaceInstance(
                    photo=pid,
                    face_index=index,
                    true_identity=identity,
                    bbox=bbox,
                    quality=quality,
                    split=split,
                )
            )
        except StructuralError as exc:
            raise ParseError(str(exc), line=line_no) from exc
    if duplicates:
        logger.warning("collapsed %d duplicate (photo, identity) annotation rows", duplicates)
    return Corpus(instances)


def _parse_generic_tsv(stream: IO[str]):
    header: list[str] | None = None
    positions: dict[str, int] = {}
    for line_no, raw in enumerate(stream, start=1):
        line = raw.rstrip("\n").rstrip("\r")
        if not line or line.startswith("#"):
            continue
        fields = line.split("\t")
        if header is None:
            header = fields
            for col in header:
                if col not in _GENERIC_COLUMNS:
                    raise ParseError(f"unknown column {col!r} in header", line=line_no)
            if "photo_id" not in header or "identity" not in header:
                raise ParseError("header must contain photo_id and identity columns", line=line_no)
            bbox_cols = [c for c in ("x", "y", "w", "h") if c in header]
            if bbox_cols and len(bbox_cols) != 4:
                raise ParseError("bbox columns x, y, w, h must appear together", line=line_no)
            positions = {col: i for i, col in enumerate(header)}
            continue
        if len(fields) != len(header):
            raise ParseError(
                f"expected {len(header)} fields, got {len(fields)}", line=line_no
            )

        def get(col: str) -> str:
            return fields[positions[col]] if col in positions else ""

        photo = get("photo_id")
        if not photo:
            raise ParseError("empty photo_id", line=line_no)
        identity = get("identity") or None
        album = get("album") or None
        bbox = _parse_bbox([get(c) for c in ("x", "y", "w", "h")], line_no)
        quality = _parse_enum(Quality, get("quality"), Quality.USABLE, line_no)
        split = _parse_enum(Split, get("split"), Split.UNASSIGNED, line_no)
        yield line_no, photo, identity, album, bbox, quality, split


def _parse_bbox(values: list[str], line_no: int) -> tuple[int, int, int, int] | None:
    present = [v for v in values if v != ""]
    if not present:
        return None
    if len(present) != 4:
        raise ParseError("bbox requires all of x, y, w, h or none", line=line_no)
    try:
        x, y, w, h = (int(v) for v in values)
    except ValueError as exc:
        raise ParseError(f"non-integer bbox field: {exc}", line=line_no) from exc
    if w <= 0 or h <= 0:
        raise ParseError(f"bbox width/height must be positive, got w={w} h={h}", line=line_no)
    return (x, y, w, h)


def _parse_enum(enum_cls, value: str, default, line_no: int):
    if not value:
        return default
    try:
        return enum_cls(value)
    except ValueError as exc:
        allowed = ", ".join(e.value for e in enum_cls)
        raise ParseError(f"invalid {enum_cls.__name__.lower()} {value!r} (allowed: {allowed})", line=line_no) from exc


def _parse_pipa_index(stream: IO[str]):
    # Columns: photoset_id photo_id xmin ymin width height identity_id subset_id
    for line_no, raw in enumerate(stream, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        fields = line.split()
        if len(fields) != 8:
            raise ParseError(f"expected 8 whitespace-separated fields, got {len(fields)}", line=line_no)
        album, photo, xmin, ymin, width, height, identity, subset = fields
        bbox = _parse_bbox([xmin, ymin, width, height], line_no)
        split = _PIPA_SPLIT_MAP.get(subset.lower())
        if split is None:
            raise ParseError(
                f"invalid subset_id {subset!r} (allowed: 1-4 or train/val/test/leftover)",
                line=line_no,
            )
        yield line_no, photo, identity, album, bbox, Quality.USABLE, split


def load_corpus(path: str | Path, format: AnnotationFormat = AnnotationFormat.GENERIC_TSV) -> Corpus:
    with open(path, "rb") as fh:
        return parse_annotations(fh, format)


def serialize_corpus(corpus: Corpus) -> str:
    """Canonical generic_tsv serialization, sorted by (photo, face_index)."""
    lines = ["\t".join(_GENERIC_COLUMNS)]
    for inst in corpus.instances:
        bbox = inst.bbox if inst.bbox is not None else ("", "", "", "")
        lines.append(
            "\t".join(
                [
                    inst.photo.photo,
                    inst.true_identity or "",
                    inst.photo.album or "",
                    *(str(v) for v in bbox),
                    inst.quality.value,
                    inst.split.value,
                ]
            )
        )
    return "\n".join(lines) + "\n"


def save_corpus(corpus: Corpus, path: str | Path) -> None:
    Path(path).write_text(serialize_corpus(corpus), encoding="utf-8")


def clean(corpus: Corpus) -> Corpus:
    """Drop rejected instances; photos left with no instances disappear with them."""
    return Corpus(inst for inst in corpus if inst.quality is Quality.USABLE)


def _class_rng(seed: int, identity: Identity) -> random.Random:
    digest = hashlib.blake2b(f"{seed}:{identity}".encode("utf-8"), digest_size=8).digest()
    return random.Random(int.from_bytes(digest, "big"))


def stratified_split(corpus: Corpus, train_frac: float, seed: int) -> tuple[Corpus, Corpus]:
    """Split per identity class: round(train_frac * n) to train (floor 1 when n >= 2).

    The assignment is a pure function of the seed; different seeds may permute
    which instances land where but never the per-class counts.  Instances
    without a ground-truth identity (possible only for rejected rows) go to
    the train side.
    """
    if not 0.0 < train_frac < 1.0:
        raise ParameterError(f"train_frac must be in (0, 1), got {train_frac}")
    by_class: dict[Identity, list[FaceInstance]] = {}
    unlabeled: list[FaceInstance] = []
    for inst in corpus:
        if inst.true_identity is None:
            if inst.quality is Quality.USABLE:
                raise MissingLabelError(
                    f"usable face {inst.photo.display}#{inst.face_index} has no true identity"
                )
            unlabeled.append(inst)
        else:
            by_class.setdefault(inst.true_identity, []).append(inst)

    train: list[FaceInstance] = [replace(inst, split=Split.TRAIN) for inst in unlabeled]
    test: list[FaceInstance] = []
    for identity in sorted(by_class):
        members = _canonical_order(by_class[identity])
        n = len(members)
        k = round(train_frac * n)
        if n >= 2:
            k = max(1, k)
        order = list(members)
        _class_rng(seed, identity).shuffle(order)
        chosen = set(order[:k])
        for inst in members:
            if inst in chosen:
                train.append(replace(inst, split=Split.TRAIN))
            else:
                test.append(replace(inst, split=Split.TEST))
    return Corpus(train), Corpus(test)


def augmentation_plan(train: Corpus, min_per_class: int) -> AugPlan:
    """Count synthetic instances needed to lift every class to ``min_per_class``.

    Emits counts plus suggested transform tags (rotate/flip/scale, cycled);
    executing the transforms on pixels is out of scope by design.
    """
    if min_per_class < 1:
        raise ParameterError(f"min_per_class must be >= 1, got {min_per_class}")
    counts: dict[Identity, int] = {}
    for inst in train:
        if inst.true_identity is not None:
            counts[inst.true_identity] = counts.get(inst.true_identity, 0) + 1
    per_class = {c: max(0, min_per_class - n) for c, n in sorted(counts.items())}
    transforms = {
        c: tuple(_TRANSFORM_CYCLE[i % len(_TRANSFORM_CYCLE)] for i in range(k))
        for c, k in per_class.items()
    }
    return AugPlan(per_class=per_class, transforms=transforms, min_per_class=min_per_class)
