"""Translate-train transfer: Spanish-English instances to Hindi-English.

Tagged utterances are segmented into alternating language spans; Spanish
spans go through a pluggable translation client (identity and uppercase
mocks ship for tests, plus a generic HTTP client), English spans are
copied byte-for-byte, and labels ride along unchanged. Translations are
cached content-addressed so reruns are deterministic and offline.
"""

from __future__ import annotations

import hashlib
import json
import logging
import threading
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Callable, Iterable, Protocol, Sequence

import requests

from .chat_parser import LangTag, Token, Utterance, retag_utterance
from .errors import TranslationFailed
from .switch_extractor import SwitchInstance, find_switch_points, last_tagged_lang

logger = logging.getLogger(__name__)

_TRANSPARENT = (LangTag.AMBIGUOUS, LangTag.OTHER)


@dataclass(frozen=True)
class LangSpan:
    lang: LangTag
    tokens: tuple[Token, ...]
    char_range: tuple[int, int]  # offsets into the utterance's joined text

    def text(self) -> str:
        return " ".join(t.text for t in self.tokens)


def segment_spans(utt: Utterance) -> list[LangSpan]:
    """Split a tagged utterance into maximal alternating language spans.

    AMBIGUOUS and OTHER tokens attach to the preceding span; a leading run
    joins the first tagged span. Concatenating the spans reproduces the
    token sequence exactly.
    """
    if not utt.tokens:
        return []

    groups: list[tuple[LangTag, list[Token]]] = []
    leading: list[Token] = []
    for token in utt.tokens:
        if token.lang in _TRANSPARENT:
            if groups:
                groups[-1][1].append(token)
            else:
                leading.append(token)
            continue
        if groups and groups[-1][0] is token.lang:
            groups[-1][1].append(token)
        else:
            groups.append((token.lang, [token]))
    if groups:
        groups[0] = (groups[0][0], leading + groups[0][1])
    else:
        groups = [(LangTag.AMBIGUOUS, leading)]

    spans: list[LangSpan] = []
    offset = 0
    for lang, tokens in groups:
        text = " ".join(t.text for t in tokens)
        start = offset
        spans.append(LangSpan(lang=lang, tokens=tuple(tokens), char_range=(start, start + len(text))))
        offset = start + len(text) + 1  # joining space
    return spans


class TranslationClient(Protocol):
    name: str

    def translate(self, text: str, source_lang: str, target_lang: str) -> str:
        ...


class IdentityTranslationClient:
    name = "identity"

    def translate(self, text: str, source_lang: str, target_lang: str) -> str:
        return text


class UppercaseTranslationClient:
    name = "upper"

    def translate(self, text: str, source_lang: str, target_lang: str) -> str:
        return text.upper()


class HttpTranslationClient:
    """Generic HTTP client configured by a URL template.

    A template containing "{text}" is called with GET after formatting
    ({text}, {source}, {target}); otherwise the URL receives a POST with
    a JSON body {"text", "source", "target"}. The response is either
    JSON with a "translation" field or the raw body.
    """

    def __init__(self, url_template: str, timeout: float = 30.0):
        self.url_template = url_template
        self.timeout = timeout
        self.name = f"http:{url_template}"

    def translate(self, text: str, source_lang: str, target_lang: str) -> str:
        try:
            if "{text}" in self.url_template:
                url = self.url_template.format(
                    text=requests.utils.quote(text), source=source_lang, target=target_lang
                )
                response = requests.get(url, timeout=self.timeout)
            else:
                response = requests.post(
                    self.url_template,
                    json={"text": text, "source": source_lang, "target": target_lang},
                    timeout=self.timeout,
                )
            response.raise_for_status()
        except requests.RequestException as exc:
            raise TranslationFailed(text, str(exc)) from exc
        try:
            payload = response.json()
            if isinstance(payload, dict) and "translation" in payload:
                return str(payload["translation"])
        except ValueError:
            pass
        return response.text


class TranslationCache:
    """Content-addressed translation cache: sha256(source|target|text) -> text."""

    def __init__(self, path: str | Path):
        self.path = Path(path)
        self._lock = threading.Lock()
        self._data: dict[str, str] = {}
        if self.path.exists():
            self._data = json.loads(self.path.read_text(encoding="utf-8"))

    @staticmethod
    def key(text: str, source_lang: str, target_lang: str) -> str:
        blob = f"{source_lang}|{target_lang}|{text}".encode("utf-8")
        return hashlib.sha256(blob).hexdigest()

    def get(self, text: str, source_lang: str, target_lang: str) -> str | None:
        return self._data.get(self.key(text, source_lang, target_lang))

    def put(self, text: str, source_lang: str, target_lang: str, translation: str) -> None:
        with self._lock:
            self._data[self.key(text, source_lang, target_lang)] = translation
            tmp = self.path.with_suffix(".tmp")
            tmp.write_text(
                json.dumps(self._data, sort_keys=True, ensure_ascii=False), encoding="utf-8"
            )
            tmp.replace(self.path)

    def __len__(self) -> int:
        return len(self._data)


class CachingClient:
    """Wraps a client with a TranslationCache and hit/call counters."""

    def __init__(self, client: TranslationClient, cache: TranslationCache):
        self.client = client
        self.cache = cache
        self.name = client.name
        self.cache_hits = 0
        self.client_calls = 0

    def translate(self, text: str, source_lang: str, target_lang: str) -> str:
        hit = self.cache.get(text, source_lang, target_lang)
        if hit is not None:
            self.cache_hits += 1
            return hit
        self.client_calls += 1
        translation = self.client.translate(text, source_lang, target_lang)
        self.cache.put(text, source_lang, target_lang, translation)
        return translation


# -- Devanagari fallback romanization ---------------------------------------

_DEVANAGARI_VOWELS = {
    "अ": "a", "आ": "aa", "इ": "i", "ई": "ee", "उ": "u", "ऊ": "oo",
    "ऋ": "ri", "ए": "e", "ऐ": "ai", "ओ": "o", "औ": "au",
}
_DEVANAGARI_MATRAS = {
    "ा": "aa", "ि": "i", "ी": "ee", "ु": "u", "ू": "oo", "ृ": "ri",
    "े": "e", "ै": "ai", "ो": "o", "ौ": "au",
}
_DEVANAGARI_CONSONANTS = {
    "क": "k", "ख": "kh", "ग": "g", "घ": "gh", "ङ": "n",
    "च": "ch", "छ": "chh", "ज": "j", "झ": "jh", "ञ": "n",
    "ट": "t", "ठ": "th", "ड": "d", "ढ": "dh", "ण": "n",
    "त": "t", "थ": "th", "द": "d", "ध": "dh", "न": "n",
    "प": "p", "फ": "ph", "ब": "b", "भ": "bh", "म": "m",
    "य": "y", "र": "r", "ल": "l", "व": "v", "श": "sh",
    "ष": "sh", "स": "s", "ह": "h", "ळ": "l", "क़": "q",
    "ख़": "kh", "ग़": "g", "ज़": "z", "ड़": "r", "ढ़": "rh", "फ़": "f",
}
_VIRAMA = "्"
_ANUSVARA = "ं"
_CHANDRABINDU = "ँ"
_VISARGA = "ः"
_NUKTA = "़"
_DANDA = {"।": ".", "॥": "."}
_DIGITS = {chr(0x966 + i): str(i) for i in range(10)}


def contains_devanagari(text: str) -> bool:
    return any("ऀ" <= ch <= "ॿ" for ch in text)


def romanize_devanagari(text: str) -> str:
    """Fixed-table Devanagari to Latin pass (word-final schwa dropped)."""
    out: list[str] = []
    chars = [ch for ch in text if ch != _NUKTA]
    for i, ch in enumerate(chars):
        if ch in _DEVANAGARI_CONSONANTS:
            out.append(_DEVANAGARI_CONSONANTS[ch])
            nxt = chars[i + 1] if i + 1 < len(chars) else ""
            if nxt in _DEVANAGARI_MATRAS or nxt == _VIRAMA:
                continue
            word_final = not ("ऀ" <= nxt <= "ॿ") or nxt in _DANDA
            if not word_final:
                out.append("a")
        elif ch in _DEVANAGARI_MATRAS:
            out.append(_DEVANAGARI_MATRAS[ch])
        elif ch in _DEVANAGARI_VOWELS:
            out.append(_DEVANAGARI_VOWELS[ch])
        elif ch == _VIRAMA:
            continue
        elif ch in (_ANUSVARA, _CHANDRABINDU):
            out.append("n")
        elif ch == _VISARGA:
            out.append("h")
        elif ch in _DANDA:
            out.append(_DANDA[ch])
        elif ch in _DIGITS:
            out.append(_DIGITS[ch])
        else:
            out.append(ch)
    return "".join(out)


# -- instance and corpus transfer --------------------------------------------

SOURCE_LANG = "spa"
TARGET_LANG = "hi-Latn"


def _translated_tokens(text: str) -> tuple[Token, ...]:
    tokens: list[Token] = []
    for raw in text.split():
        if any(ch.isalnum() for ch in raw):
            tokens.append(Token(text=raw, lang=LangTag.HIN, explicit=False))
        else:
            tokens.append(Token(text=raw, lang=LangTag.OTHER, explicit=False))
    return tuple(tokens)


def _transfer_utterance(utt: Utterance, client: TranslationClient, romanize: bool) -> Utterance:
    new_tokens: list[Token] = []
    for span in segment_spans(utt):
        if span.lang is LangTag.SPA:
            source = span.text()
            try:
                translation = client.translate(source, SOURCE_LANG, TARGET_LANG)
            except TranslationFailed:
                raise
            except Exception as exc:  # client bugs become span failures, never silent drops
                raise TranslationFailed(source, str(exc)) from exc
            if romanize and contains_devanagari(translation):
                translation = romanize_devanagari(translation)
            if not translation.strip():
                raise TranslationFailed(source, "empty translation")
            new_tokens.extend(_translated_tokens(translation))
        else:
            new_tokens.extend(span.tokens)
    return retag_utterance(utt, new_tokens)


def _recomputed_points(context: Sequence[Utterance], focus_offset: int) -> tuple[tuple[int, int], ...]:
    # prev_lang carries through the same-speaker run immediately before the focus
    focus = context[focus_offset]
    run_start = focus_offset
    while run_start > 0 and context[run_start - 1].speaker == focus.speaker:
        run_start -= 1
    prev_lang: LangTag | None = None
    for utt in context[run_start:focus_offset]:
        prev_lang = last_tagged_lang(utt, default=prev_lang)
    points = find_switch_points(focus, prev_lang)
    return tuple((focus_offset, idx) for idx, _, _ in points)


def transfer_instance(
    instance: SwitchInstance,
    client: TranslationClient,
    romanize: bool = True,
) -> SwitchInstance:
    """Replace the Spanish spans of every context utterance via the client.

    English spans are preserved byte-for-byte, labels carry over, and the
    provenance field links back to the source instance.
    """
    focus_offset = instance.focus_offset()
    new_context = tuple(
        _transfer_utterance(utt, client, romanize) for utt in instance.context
    )
    return replace(
        instance,
        context=new_context,
        switch_points=_recomputed_points(new_context, focus_offset),
        text=" ".join(f"{u.speaker}: {u.text()}" for u in new_context),
        provenance={
            "source_instance_id": instance.id,
            "client": getattr(client, "name", type(client).__name__),
            "direction": f"{SOURCE_LANG}->{TARGET_LANG}",
        },
    )


@dataclass
class TransferReport:
    total: int = 0
    transferred: int = 0
    failed: int = 0
    failures: list[dict] = None  # type: ignore[assignment]
    cache_hits: int = 0
    client_calls: int = 0

    def __post_init__(self):
        if self.failures is None:
            self.failures = []

    def to_json(self) -> dict:
        return {
            "total": self.total,
            "transferred": self.transferred,
            "failed": self.failed,
            "failures": self.failures,
            "cache_hits": self.cache_hits,
            "client_calls": self.client_calls,
        }


def transfer_corpus(
    instances: Iterable[SwitchInstance],
    client: TranslationClient,
    romanize: bool = True,
) -> tuple[list[SwitchInstance], TransferReport]:
    """Apply transfer_instance to a corpus; failures are logged and counted."""
    report = TransferReport()
    output: list[SwitchInstance] = []
    for instance in instances:
        report.total += 1
        try:
            output.append(transfer_instance(instance, client, romanize))
            report.transferred += 1
        except TranslationFailed as exc:
            report.failed += 1
            report.failures.append({"instance_id": instance.id, "error": str(exc)})
            logger.warning("skipping %s: %s", instance.id, exc)
    if isinstance(client, CachingClient):
        report.cache_hits = client.cache_hits
        report.client_calls = client.client_calls
    assert report.transferred + report.failed == report.total
    return output, report


def make_client(spec: str, cache_path: str | Path | None = None) -> TranslationClient:
    """Build a client from a CLI spec: identity | upper | http:<url>."""
    if spec == "identity":
        client: TranslationClient = IdentityTranslationClient()
    elif spec == "upper":
        client = UppercaseTranslationClient()
    elif spec.startswith("http:") or spec.startswith("https:"):
        url = spec.split(":", 1)[1] if spec.startswith("http:") and not spec.startswith("http://") else spec
        client = HttpTranslationClient(url)
    else:
        raise ValueError(f"unknown translation client spec {spec!r}")
    if cache_path is not None:
        client = CachingClient(client, TranslationCache(cache_path))
    return client
