"""Motivation-label schema, annotation storage, and agreement statistics.

Eleven labels describe why a speaker switched languages; one switch can
carry any subset of them, including none. Records are appended to JSONL
and compacted with last-write-wins per (instance, annotator).
"""

from __future__ import annotations

import json
import threading
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .errors import EmptyStore, MissingRecord, SchemaVersionMismatch

SCHEMA_VERSION = "1.0"

# key, display name, definition, canonical example
_LABELS: tuple[tuple[str, str, str, str], ...] = (
    ("change_topic", "Change topic",
     "Switching languages to introduce another viewpoint, change the tone, or clarify.",
     "I'm not ready at all, ¿y qué tal tú?"),
    ("borrowing", "Borrowing",
     "Substituting a short word or phrase from the other language, then returning to the original.",
     "Mi amiga de high school va a casarse en dos semanas."),
    ("joke", "Joke",
     "Switching languages for comedic effect or a sarcastic quip.",
     "You're making such a big deal about it, como si murieran las personas en la calle."),
    ("quote", "Quote",
     "Switching languages to stay true to how a statement was originally spoken.",
     'So my Spanish teacher said, "Oye, necesitas estudiar más."'),
    ("translate", "Translate",
     "Repeating a statement or phrase in the other language, often for emphasis or clarity.",
     "A veces, sometimes, I like to be by myself."),
    ("command", "Command",
     "Switching languages to issue a mandate or imperative aimed at the addressee.",
     "Él no sabe lo que está diciendo, just don't listen to him."),
    ("filler", "Filler",
     "Switching languages for a filler, brief interjection, or short noise that carries meaning.",
     "Y yo me callé, you know, porque no quería ofender a nadie."),
    ("exasperation", "Exasperation",
     "Switching languages to complain or to emphasize anger or frustration.",
     "Ay, cómo me sigues molestando, I should just get up and leave!"),
    ("happiness", "Happiness",
     "Switching languages to make a compliment or a positive interjection.",
     "I just saw her dress, ¡qué lindo!"),
    ("proper_noun", "Proper noun",
     "Switching languages to name people or places whose names belong to the other language.",
     "Escogimos United Airlines porque ellos ofrecen las mejores meriendas."),
    ("surprise", "Surprise",
     "Switching languages to interject or relay that something was unexpected.",
     "¿Qué hizo ella? Oh my god."),
)


@dataclass(frozen=True)
class LabelSchema:
    version: str = SCHEMA_VERSION
    labels: tuple[tuple[str, str, str, str], ...] = _LABELS

    @property
    def keys(self) -> tuple[str, ...]:
        return tuple(key for key, _, _, _ in self.labels)

    def index(self, key: str) -> int:
        return self.keys.index(key)

    def to_json(self) -> dict:
        return {
            "version": self.version,
            "labels": [
                {"key": k, "name": n, "definition": d, "example": e}
                for k, n, d, e in self.labels
            ],
        }


SCHEMA = LabelSchema()
LABEL_KEYS = SCHEMA.keys


@dataclass(frozen=True)
class LabelSet:
    bits: tuple[bool, ...]

    def __post_init__(self):
        if len(self.bits) != len(LABEL_KEYS):
            raise ValueError(f"LabelSet needs exactly {len(LABEL_KEYS)} booleans")

    @classmethod
    def none(cls) -> "LabelSet":
        return cls(bits=(False,) * len(LABEL_KEYS))

    @classmethod
    def of(cls, *keys: str) -> "LabelSet":
        wanted = set(keys)
        unknown = wanted - set(LABEL_KEYS)
        if unknown:
            raise ValueError(f"unknown label keys: {sorted(unknown)}")
        return cls(bits=tuple(k in wanted for k in LABEL_KEYS))

    @classmethod
    def from_mapping(cls, mapping: Mapping[str, bool]) -> "LabelSet":
        if set(mapping) != set(LABEL_KEYS):
            raise ValueError("label mapping must contain exactly the schema keys")
        return cls(bits=tuple(bool(mapping[k]) for k in LABEL_KEYS))

    def get(self, key: str) -> bool:
        return self.bits[SCHEMA.index(key)]

    def true_keys(self) -> tuple[str, ...]:
        return tuple(k for k, b in zip(LABEL_KEYS, self.bits) if b)

    def count(self) -> int:
        return sum(self.bits)

    def to_json(self) -> dict[str, bool]:
        return {k: b for k, b in zip(LABEL_KEYS, self.bits)}


@dataclass(frozen=True)
class AnnotationRecord:
    instance_id: str
    annotator_id: str
    labels: LabelSet
    created_at: str = field(default_factory=lambda: datetime.now(timezone.utc).isoformat())
    schema_version: str = SCHEMA_VERSION

    def to_json(self) -> dict:
        return {
            "instance_id": self.instance_id,
            "annotator_id": self.annotator_id,
            "labels": self.labels.to_json(),
            "created_at": self.created_at,
            "schema_version": self.schema_version,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "AnnotationRecord":
        return cls(
            instance_id=obj["instance_id"],
            annotator_id=obj["annotator_id"],
            labels=LabelSet.from_mapping(obj["labels"]),
            created_at=obj.get("created_at", ""),
            schema_version=obj.get("schema_version", SCHEMA_VERSION),
        )


class AnnotationStore:
    """Append-only JSONL store; the latest record per (instance, annotator) wins.

    Appends are serialized by a lock so concurrent annotators can submit
    through one process safely; every accepted record lands on disk before
    submit() returns.
    """

    def __init__(self, path: str | Path, schema: LabelSchema = SCHEMA):
        self.path = Path(path)
        self.schema = schema
        self._lock = threading.Lock()
        self._records: dict[tuple[str, str], AnnotationRecord] = {}
        if self.path.exists():
            self._load()

    def _load(self) -> None:
        with self.path.open("r", encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                record = AnnotationRecord.from_json(json.loads(line))
                self._validate(record)
                self._records[(record.instance_id, record.annotator_id)] = record

    def _validate(self, record: AnnotationRecord) -> None:
        if record.schema_version != self.schema.version:
            raise SchemaVersionMismatch(self.schema.version, record.schema_version)

    def submit(self, record: AnnotationRecord) -> None:
        self._validate(record)
        with self._lock:
            with self.path.open("a", encoding="utf-8") as fh:
                fh.write(json.dumps(record.to_json(), ensure_ascii=False) + "\n")
                fh.flush()
            self._records[(record.instance_id, record.annotator_id)] = record

    def get(self, instance_id: str, annotator_id: str) -> AnnotationRecord | None:
        return self._records.get((instance_id, annotator_id))

    def records_by(self, annotator_id: str) -> dict[str, AnnotationRecord]:
        return {
            iid: rec
            for (iid, aid), rec in self._records.items()
            if aid == annotator_id
        }

    def annotators(self) -> list[str]:
        return sorted({aid for _, aid in self._records})

    def __len__(self) -> int:
        return len(self._records)

    def compact(self) -> None:
        """Rewrite the file keeping only the winning record per key."""
        with self._lock:
            records = sorted(self._records.values(), key=lambda r: (r.instance_id, r.annotator_id))
            tmp = self.path.with_suffix(".tmp")
            with tmp.open("w", encoding="utf-8") as fh:
                for record in records:
                    fh.write(json.dumps(record.to_json(), ensure_ascii=False) + "\n")
            tmp.replace(self.path)


@dataclass(frozen=True)
class LabelDistribution:
    frequencies: dict[str, float]
    multilabel_rate: float
    no_label_count: int
    n_instances: int

    def to_json(self) -> dict:
        return {
            "frequencies": self.frequencies,
            "multilabel_rate": self.multilabel_rate,
            "no_label_count": self.no_label_count,
            "n_instances": self.n_instances,
        }


def label_distribution(records: Iterable[AnnotationRecord]) -> LabelDistribution:
    """Per-label frequency over one annotator's records, plus the multi-label rate."""
    records = list(records)
    if not records:
        raise EmptyStore()
    n = len(records)
    counts = {k: 0 for k in LABEL_KEYS}
    multi = 0
    no_label = 0
    for record in records:
        k = record.labels.count()
        if k >= 2:
            multi += 1
        if k == 0:
            no_label += 1
        for key in record.labels.true_keys():
            counts[key] += 1
    return LabelDistribution(
        frequencies={k: counts[k] / n for k in LABEL_KEYS},
        multilabel_rate=multi / n,
        no_label_count=no_label,
        n_instances=n,
    )


def _paired_bools(
    store: AnnotationStore, a: str, b: str, label: str, instances: Sequence[str]
) -> list[tuple[bool, bool]]:
    pairs = []
    for iid in instances:
        rec_a = store.get(iid, a)
        if rec_a is None:
            raise MissingRecord(iid, a)
        rec_b = store.get(iid, b)
        if rec_b is None:
            raise MissingRecord(iid, b)
        pairs.append((rec_a.labels.get(label), rec_b.labels.get(label)))
    return pairs


def agreement_accuracy(
    store: AnnotationStore, a: str, b: str, label: str, instances: Sequence[str]
) -> float:
    """Fraction of instances where both annotators agree on `label`."""
    pairs = _paired_bools(store, a, b, label, instances)
    if not pairs:
        raise EmptyStore("agreement subset is empty")
    return sum(x == y for x, y in pairs) / len(pairs)


def agreement_kappa(
    store: AnnotationStore, a: str, b: str, label: str, instances: Sequence[str]
) -> float | None:
    """Cohen's kappa with marginal-product chance agreement.

    Returns None (the undefined sentinel) when expected agreement is 1,
    i.e. both annotators are constant.
    """
    pairs = _paired_bools(store, a, b, label, instances)
    if not pairs:
        raise EmptyStore("agreement subset is empty")
    n = len(pairs)
    p_o = sum(x == y for x, y in pairs) / n
    pa = sum(x for x, _ in pairs) / n
    pb = sum(y for _, y in pairs) / n
    p_e = pa * pb + (1 - pa) * (1 - pb)
    if p_e == 1.0:
        return None
    return (p_o - p_e) / (1 - p_e)


def canonical_fixture_records(annotator_id: str = "fixtures") -> list[AnnotationRecord]:
    """One record per schema label, built from its canonical example sentence."""
    return [
        AnnotationRecord(
            instance_id=f"canonical-{key}",
            annotator_id=annotator_id,
            labels=LabelSet.of(key),
            created_at="1970-01-01T00:00:00+00:00",
        )
        for key in LABEL_KEYS
    ]
