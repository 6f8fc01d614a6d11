"""Code-switch detection over tagged utterances.

A switch point sits between consecutive meaningfully-tagged tokens whose
languages differ; AMBIGUOUS and OTHER tokens are transparent to the
comparison. Each utterance with at least one point becomes a
SwitchInstance carrying a context window of surrounding lines.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Iterable, Sequence

from .chat_parser import LangTag, Transcript, Utterance

_TRANSPARENT = (LangTag.AMBIGUOUS, LangTag.OTHER)


@dataclass(frozen=True)
class SwitchInstance:
    id: str
    transcript_id: str
    focus_line: int
    context: tuple[Utterance, ...]
    switch_points: tuple[tuple[int, int], ...]  # (utterance_offset, token_index)
    text: str
    labels: dict[str, bool] | None = None       # gold labels once annotated
    provenance: dict | None = None              # e.g. translate-train source link

    def focus_offset(self) -> int:
        for i, utt in enumerate(self.context):
            if utt.line_no == self.focus_line:
                return i
        raise ValueError(f"focus line {self.focus_line} not in context of {self.id}")

    def focus(self) -> Utterance:
        return self.context[self.focus_offset()]

    def to_json(self) -> dict:
        obj = {
            "id": self.id,
            "transcript_id": self.transcript_id,
            "focus_line": self.focus_line,
            "context": [u.to_json() for u in self.context],
            "switch_points": [list(p) for p in self.switch_points],
            "text": self.text,
        }
        if self.labels is not None:
            obj["labels"] = self.labels
        if self.provenance is not None:
            obj["provenance"] = self.provenance
        return obj

    @classmethod
    def from_json(cls, obj: dict) -> "SwitchInstance":
        return cls(
            id=obj["id"],
            transcript_id=obj["transcript_id"],
            focus_line=int(obj["focus_line"]),
            context=tuple(Utterance.from_json(u) for u in obj["context"]),
            switch_points=tuple((int(a), int(b)) for a, b in obj["switch_points"]),
            text=obj["text"],
            labels=obj.get("labels"),
            provenance=obj.get("provenance"),
        )

    def with_labels(self, labels: dict[str, bool]) -> "SwitchInstance":
        return replace(self, labels=dict(labels))


def find_switch_points(
    utt: Utterance, prev_lang: LangTag | None = None
) -> list[tuple[int, LangTag, LangTag]]:
    """Return (token_index, from_lang, to_lang) for each language change.

    The index is the first token of the new language. A change relative to
    prev_lang is reported at the first tagged token; pass None at the start
    of a speaker turn.
    """
    points: list[tuple[int, LangTag, LangTag]] = []
    last = prev_lang if prev_lang not in _TRANSPARENT else None
    for i, token in enumerate(utt.tokens):
        if token.lang in _TRANSPARENT:
            continue
        if last is not None and token.lang is not last:
            points.append((i, last, token.lang))
        last = token.lang
    return points


def last_tagged_lang(utt: Utterance, default: LangTag | None = None) -> LangTag | None:
    for token in reversed(utt.tokens):
        if token.lang not in _TRANSPARENT:
            return token.lang
    return default


def _flatten(context: Sequence[Utterance]) -> str:
    return " ".join(f"{u.speaker}: {u.text()}" for u in context)


def extract_instances(
    transcript: Transcript,
    window: int = 3,
    detection: str = "tags",
) -> list[SwitchInstance]:
    """Materialize one SwitchInstance per code-switched utterance.

    detection="tags" emits an instance for every utterance with a tag-level
    switch point (prev_lang threads through same-speaker turns and resets
    on speaker change). detection="markers" instead keeps every utterance
    containing an explicit language marker, replicating marker-based
    filtering; such instances may carry zero tag-level switch points.
    """
    if detection not in ("tags", "markers"):
        raise ValueError(f"unknown detection mode {detection!r}")

    utts = transcript.utterances
    instances: list[SwitchInstance] = []
    prev_lang: LangTag | None = None
    prev_speaker: str | None = None
    ordinal = 0

    for i, utt in enumerate(utts):
        if utt.speaker != prev_speaker:
            prev_lang = None
        points = find_switch_points(utt, prev_lang)

        if detection == "tags":
            keep = bool(points)
        else:
            keep = any(t.explicit for t in utt.tokens)

        if keep:
            start = max(0, i - window)
            stop = min(len(utts), i + window + 1)
            context = utts[start:stop]
            focus_offset = i - start
            instance = SwitchInstance(
                id=f"{transcript.id}-{utt.line_no:05d}-{ordinal:03d}",
                transcript_id=transcript.id,
                focus_line=utt.line_no,
                context=tuple(context),
                switch_points=tuple((focus_offset, idx) for idx, _, _ in points),
                text=_flatten(context),
            )
            instances.append(instance)
            ordinal += 1

        prev_lang = last_tagged_lang(utt, default=prev_lang)
        prev_speaker = utt.speaker

    return instances


def write_instances_jsonl(instances: Iterable[SwitchInstance], path: str | Path) -> int:
    n = 0
    with Path(path).open("w", encoding="utf-8") as fh:
        for inst in instances:
            fh.write(json.dumps(inst.to_json(), ensure_ascii=False) + "\n")
            n += 1
    return n


def read_instances_jsonl(path: str | Path) -> list[SwitchInstance]:
    instances = []
    with Path(path).open("r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                instances.append(SwitchInstance.from_json(json.loads(line)))
    return instances
