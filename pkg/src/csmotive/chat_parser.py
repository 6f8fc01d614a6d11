"""CHAT-style transcript parsing.

Turns speaker-prefixed transcript lines into Transcript/Utterance/Token
structures with per-token language tags, stripping transcription noise
(retracing marks, pauses, paralinguistic events, timing bullets).

Recognized language markers:
  - word suffix tags:   palabra@s:spa, trainers@s:eng, word@s:eng&spa
  - utterance precodes: [- spa] at the start of an utterance

Unmarked word tokens are left AMBIGUOUS for later language identification.
"""

from __future__ import annotations

import io
import json
import logging
import re
from dataclasses import dataclass, field, replace
from enum import Enum
from pathlib import Path
from typing import Iterable, Iterator, TextIO

from .errors import EmptyTranscript, MalformedLine

logger = logging.getLogger(__name__)


class LangTag(str, Enum):
    ENG = "eng"
    SPA = "spa"
    HIN = "hin"
    AMBIGUOUS = "ambiguous"
    OTHER = "other"


# Fixed order used for deterministic tie-breaking everywhere.
LANG_ORDER = (LangTag.ENG, LangTag.SPA, LangTag.HIN)

_TAG_CODES = {"eng": LangTag.ENG, "spa": LangTag.SPA, "hin": LangTag.HIN}


@dataclass(frozen=True)
class Token:
    text: str
    lang: LangTag = LangTag.AMBIGUOUS
    explicit: bool = False

    def is_punct(self) -> bool:
        return not any(ch.isalnum() for ch in self.text)

    def to_json(self) -> dict:
        return {"text": self.text, "lang": self.lang.value, "explicit": self.explicit}

    @classmethod
    def from_json(cls, obj: dict) -> "Token":
        return cls(text=obj["text"], lang=LangTag(obj["lang"]), explicit=bool(obj["explicit"]))


@dataclass(frozen=True)
class Utterance:
    speaker: str
    tokens: tuple[Token, ...]
    line_no: int

    def text(self) -> str:
        return " ".join(t.text for t in self.tokens)

    def to_json(self, transcript_id: str | None = None) -> dict:
        obj: dict = {}
        if transcript_id is not None:
            obj["transcript"] = transcript_id
        obj["line_no"] = self.line_no
        obj["speaker"] = self.speaker
        obj["tokens"] = [t.to_json() for t in self.tokens]
        return obj

    @classmethod
    def from_json(cls, obj: dict) -> "Utterance":
        return cls(
            speaker=obj["speaker"],
            tokens=tuple(Token.from_json(t) for t in obj["tokens"]),
            line_no=int(obj["line_no"]),
        )


@dataclass(frozen=True)
class Transcript:
    id: str
    utterances: tuple[Utterance, ...]

    def __post_init__(self):
        if not self.id:
            raise ValueError("transcript id must be non-empty")


@dataclass(frozen=True)
class ParserProfile:
    """Noise-removal inventory; the defaults cover standard CHAT practice."""

    drop_unintelligible: frozenset[str] = frozenset({"xxx"})
    drop_event_tokens: bool = True          # &=laughs, &-uh, &+fragment
    drop_retraced_material: bool = False    # keep "<I want> [//] I need" words by default
    default_matrix_lang: LangTag = LangTag.ENG  # seeds langid priors, never overrides markers
    skip_dependent_tiers: bool = True       # %mor:, %com:, ...


# Utterance lines: "*MAR:\t..." (CHAT) or bare "MAR: ..." (plain text).
_SPEAKER_RE = re.compile(r"^\*?(?P<spk>[A-Z][A-Z0-9]{1,7}):\s*(?P<body>.*)$")
_PRECODE_RE = re.compile(r"^\[-\s*(?P<code>[a-zA-Z&]+)\s*\]\s*")
_RETRACE_RE = re.compile(r"\[/{1,3}\]")
_RETRACED_GROUP_RE = re.compile(r"(?:<[^<>]*>|\S+)\s*\[/{1,3}\]")
_PAUSE_RE = re.compile(r"\((?:\.{1,3}|\d+(?:\.\d+)?)\)")
_BULLET_RE = re.compile("\x15[^\x15]*\x15")
_BRACKET_GROUP_RE = re.compile(r"\[[^\[\]]*\]")
_WORD_TAG_RE = re.compile(r"^(?P<word>.+?)@(?P<code>[a-z][a-z0-9:&+-]*)$")
_CONTROL_RE = re.compile(r"[\x00-\x1f\x7f]")


def _split_edge_punct(raw: str) -> list[tuple[str, bool]]:
    """Split leading/trailing punctuation runs off a whitespace token.

    Returns (text, is_word) pairs; edge punctuation runs become their own
    tokens so downstream bag-of-words features can drop them uniformly.
    """
    if not raw:
        return []
    if not any(ch.isalnum() for ch in raw):
        return [(raw, False)]
    start = 0
    end = len(raw)
    while start < end and not raw[start].isalnum():
        start += 1
    while end > start and not raw[end - 1].isalnum():
        end -= 1
    parts: list[tuple[str, bool]] = []
    if start > 0:
        parts.append((raw[:start], False))
    parts.append((raw[start:end], True))
    if end < len(raw):
        parts.append((raw[end:], False))
    return parts


def _check_brackets(body: str, line_no: int) -> None:
    depth = 0
    for ch in body:
        if ch == "[":
            depth += 1
        elif ch == "]":
            depth -= 1
            if depth < 0:
                raise MalformedLine(line_no)
    if depth != 0:
        raise MalformedLine(line_no)


def _parse_word_tag(raw: str) -> tuple[str, LangTag | None, bool]:
    """Consume a trailing @-marker; returns (text, lang or None, explicit)."""
    m = _WORD_TAG_RE.match(raw)
    if not m:
        return raw, None, False
    word, code = m.group("word"), m.group("code")
    if code == "s" or code.startswith("s:"):
        lang_code = code[2:] if code.startswith("s:") else ""
        if lang_code in _TAG_CODES:
            return word, _TAG_CODES[lang_code], True
        # Dual or unknown codes ("eng&spa") mark the word as explicitly ambiguous.
        return word, LangTag.AMBIGUOUS, True
    # Non-language @ suffixes (@o, @g, ...) are stripped without a tag.
    return word, None, False


def _clean_body(body: str, line_no: int, profile: ParserProfile) -> tuple[str, LangTag | None]:
    body = _BULLET_RE.sub(" ", body)
    _check_brackets(body, line_no)

    precode_lang: LangTag | None = None
    m = _PRECODE_RE.match(body)
    if m:
        code = m.group("code").lower()
        if code in _TAG_CODES:
            precode_lang = _TAG_CODES[code]
        else:
            logger.warning("line %d: unknown precode [- %s] ignored", line_no, code)
        body = body[m.end():]

    if profile.drop_retraced_material:
        body = _RETRACED_GROUP_RE.sub(" ", body)
    else:
        body = _RETRACE_RE.sub(" ", body)

    body = _PAUSE_RE.sub(" ", body)

    def _strip_group(match: re.Match) -> str:
        group = match.group(0)
        logger.warning("line %d: stripped bracket code %s", line_no, group)
        return " "

    body = _BRACKET_GROUP_RE.sub(_strip_group, body)
    # Angle brackets only delimit retracing groups; the words stay.
    body = body.replace("<", " ").replace(">", " ")
    # Residual parentheses come from shortenings like "(be)cause".
    body = body.replace("(", "").replace(")", "")
    body = _CONTROL_RE.sub(" ", body)
    return body, precode_lang


def _tokenize(body: str, precode_lang: LangTag | None, profile: ParserProfile) -> list[Token]:
    tokens: list[Token] = []
    for raw in body.split():
        if profile.drop_event_tokens and raw.startswith("&"):
            continue
        if raw.startswith("+") and not any(ch.isalnum() for ch in raw):
            continue  # utterance terminators like +... or +//.
        word, tag_lang, explicit = _parse_word_tag(raw)
        for text, is_word in _split_edge_punct(word):
            if not is_word:
                tokens.append(Token(text=text))
                continue
            if text in profile.drop_unintelligible:
                continue
            if explicit and tag_lang is not None:
                tokens.append(Token(text=text, lang=tag_lang, explicit=True))
            elif precode_lang is not None:
                tokens.append(Token(text=text, lang=precode_lang, explicit=True))
            else:
                tokens.append(Token(text=text))
    return tokens


def parse_transcript(
    raw: TextIO | str,
    transcript_id: str,
    profile: ParserProfile = ParserProfile(),
) -> Transcript:
    """Parse one CHAT-style transcript into an immutable Transcript.

    Raises MalformedLine for unbalanced bracket groups and EmptyTranscript
    when nothing survives filtering.
    """
    stream = io.StringIO(raw) if isinstance(raw, str) else raw

    # Merge continuation lines (leading whitespace) into their utterance.
    pending: tuple[str, str, int] | None = None  # (speaker, body, line_no)
    merged: list[tuple[str, str, int]] = []
    for line_no, line in enumerate(stream, start=1):
        line = line.rstrip("\n")
        if not line.strip():
            continue
        stripped = line.lstrip()
        if line[0] in (" ", "\t") and pending is not None and not stripped.startswith(("*", "@", "%")):
            pending = (pending[0], pending[1] + " " + stripped, pending[2])
            continue
        if pending is not None:
            merged.append(pending)
            pending = None
        if stripped.startswith("@"):
            continue
        if stripped.startswith("%"):
            continue  # dependent tiers are always skipped
        m = _SPEAKER_RE.match(stripped)
        if m:
            pending = (m.group("spk"), m.group("body"), line_no)
            continue
        logger.warning("line %d: unrecognized line skipped: %s", line_no, stripped[:40])
    if pending is not None:
        merged.append(pending)

    utterances: list[Utterance] = []
    for speaker, body, line_no in merged:
        cleaned, precode_lang = _clean_body(body, line_no, profile)
        tokens = _tokenize(cleaned, precode_lang, profile)
        if not tokens:
            continue  # event-only or fully-noisy lines are dropped
        utterances.append(Utterance(speaker=speaker, tokens=tuple(tokens), line_no=line_no))

    if not utterances:
        raise EmptyTranscript(transcript_id)
    return Transcript(id=transcript_id, utterances=tuple(utterances))


def parse_file(path: str | Path, profile: ParserProfile = ParserProfile()) -> Transcript:
    path = Path(path)
    with path.open("r", encoding="utf-8") as fh:
        return parse_transcript(fh, transcript_id=path.stem, profile=profile)


@dataclass(frozen=True)
class CorpusStats:
    utterances: int
    words_eng: int
    words_spa: int
    words_hin: int
    ambiguous: int
    other: int

    @property
    def total_tokens(self) -> int:
        return self.words_eng + self.words_spa + self.words_hin + self.ambiguous + self.other

    def to_json(self) -> dict:
        return {
            "utterances": self.utterances,
            "words_eng": self.words_eng,
            "words_spa": self.words_spa,
            "words_hin": self.words_hin,
            "ambiguous": self.ambiguous,
            "other": self.other,
            "total_tokens": self.total_tokens,
        }


def corpus_stats(transcripts: Iterable[Transcript]) -> CorpusStats:
    """Token counts partitioned by language tag, plus the utterance count."""
    n_utt = 0
    counts = {tag: 0 for tag in LangTag}
    for transcript in transcripts:
        for utt in transcript.utterances:
            n_utt += 1
            for tok in utt.tokens:
                counts[tok.lang] += 1
    return CorpusStats(
        utterances=n_utt,
        words_eng=counts[LangTag.ENG],
        words_spa=counts[LangTag.SPA],
        words_hin=counts[LangTag.HIN],
        ambiguous=counts[LangTag.AMBIGUOUS],
        other=counts[LangTag.OTHER],
    )


def write_corpus_jsonl(transcripts: Iterable[Transcript], path: str | Path) -> int:
    """Write the canonical corpus JSONL, one utterance per line."""
    n = 0
    with Path(path).open("w", encoding="utf-8") as fh:
        for transcript in transcripts:
            for utt in transcript.utterances:
                fh.write(json.dumps(utt.to_json(transcript.id), ensure_ascii=False) + "\n")
                n += 1
    return n


def read_corpus_jsonl(path: str | Path) -> list[Transcript]:
    """Read canonical corpus JSONL back into Transcript objects (file order)."""
    by_id: dict[str, list[Utterance]] = {}
    order: list[str] = []
    with Path(path).open("r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            obj = json.loads(line)
            tid = obj["transcript"]
            if tid not in by_id:
                by_id[tid] = []
                order.append(tid)
            by_id[tid].append(Utterance.from_json(obj))
    return [Transcript(id=tid, utterances=tuple(by_id[tid])) for tid in order]


def render_chat_text(transcript: Transcript) -> str:
    """Re-emit a transcript as clean CHAT-style text.

    Explicit language tags are re-emitted as word suffixes so a re-parse
    reproduces the same structure; all noise is already gone.
    """
    reverse = {LangTag.ENG: "eng", LangTag.SPA: "spa", LangTag.HIN: "hin"}
    lines = []
    for utt in transcript.utterances:
        parts = []
        for tok in utt.tokens:
            if tok.explicit and tok.lang in reverse:
                parts.append(f"{tok.text}@s:{reverse[tok.lang]}")
            elif tok.explicit and tok.lang is LangTag.AMBIGUOUS:
                parts.append(f"{tok.text}@s:eng&spa")
            else:
                parts.append(tok.text)
        lines.append(f"*{utt.speaker}:\t" + " ".join(parts))
    return "\n".join(lines) + "\n"


def retag_utterance(utt: Utterance, tokens: Iterable[Token]) -> Utterance:
    return replace(utt, tokens=tuple(tokens))


def iter_utterances(transcripts: Iterable[Transcript]) -> Iterator[tuple[str, Utterance]]:
    for transcript in transcripts:
        for utt in transcript.utterances:
            yield transcript.id, utt
