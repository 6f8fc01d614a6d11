"""Word-level language identification.

A character n-gram model (orders 1..3, add-one smoothing, word-boundary
sentinels) plus per-language lexicons. A word found in exactly one lexicon
short-circuits the n-gram decision; a log-odds gap below the ambiguity
margin yields AMBIGUOUS instead of a guess.

The identifier follows the sklearn estimator protocol (fit / predict /
get_params) so it slots into existing pipelines.
"""

from __future__ import annotations

import json
import math
from importlib import resources
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from sklearn.base import BaseEstimator
from sklearn.exceptions import NotFittedError

from .chat_parser import LANG_ORDER, LangTag, Token, Utterance, retag_utterance
from .errors import InsufficientSeed

MODEL_FORMAT = "csmotive-langid/1"

_START = "\x02"
_END = "\x03"
_UNK = "\x04"

LEXICON_FILES = {LangTag.ENG: "eng.txt", LangTag.SPA: "spa.txt", LangTag.HIN: "hin.txt"}


def bundled_seed_corpora(langs: Sequence[LangTag] = LANG_ORDER) -> dict[LangTag, list[str]]:
    """Load the seed lexicons shipped with the package."""
    corpora: dict[LangTag, list[str]] = {}
    base = resources.files("csmotive").joinpath("data/lexicons")
    for lang in langs:
        text = base.joinpath(LEXICON_FILES[lang]).read_text(encoding="utf-8")
        corpora[lang] = [w for w in text.split() if w]
    return corpora


def _ngram_counts(words: Iterable[str], order: int) -> dict[str, int]:
    counts: dict[str, int] = {}
    for word in words:
        padded = _START * (order - 1) + word + _END
        for i in range(order - 1, len(padded)):
            gram = padded[i - order + 1 : i + 1]
            counts[gram] = counts.get(gram, 0) + 1
    return counts


class CharNgramLanguageIdentifier(BaseEstimator):
    """Per-word language identifier over char n-grams and seed lexicons.

    Parameters
    ----------
    orders : n-gram orders summed into the score (default 1..3).
    ambiguity_margin : minimum log-odds gap (nats) between the best and
        second-best language before committing to a tag; >= 0.
    min_words : per-language seed size floor enforced by fit.
    """

    def __init__(self, orders: tuple[int, ...] = (1, 2, 3), ambiguity_margin: float = 0.5,
                 min_words: int = 1000):
        self.orders = orders
        self.ambiguity_margin = ambiguity_margin
        self.min_words = min_words

    # -- fitting -----------------------------------------------------------
    def fit(self, seed_corpora: Mapping[LangTag, Sequence[str]], y=None):
        if self.ambiguity_margin < 0:
            raise ValueError("ambiguity_margin must be >= 0")
        languages = [lang for lang in LANG_ORDER if lang in seed_corpora]
        if len(languages) < 2:
            raise ValueError("need seed corpora for at least two languages")

        lexicons: dict[LangTag, frozenset[str]] = {}
        counts: dict[LangTag, dict[int, dict[str, int]]] = {}
        alphabet: set[str] = set()
        for lang in languages:
            words = [w.strip().casefold() for w in seed_corpora[lang] if w.strip()]
            if len(words) < self.min_words:
                raise InsufficientSeed(lang.value, len(words), self.min_words)
            lexicons[lang] = frozenset(words)
            counts[lang] = {n: _ngram_counts(words, n) for n in self.orders}
            for w in words:
                alphabet.update(w)

        self.languages_ = tuple(languages)
        self.lexicons_ = lexicons
        self.ngram_counts_ = counts
        # predicted symbols: alphabet + end sentinel + unseen bucket
        self.alphabet_ = frozenset(alphabet)
        self.vocab_size_ = len(alphabet) + 2
        self._context_totals = {
            lang: {
                n: self._totals_for(counts[lang][n], n) for n in self.orders
            }
            for lang in languages
        }
        return self

    @staticmethod
    def _totals_for(grams: dict[str, int], order: int) -> dict[str, int]:
        totals: dict[str, int] = {}
        for gram, c in grams.items():
            ctx = gram[:-1]
            totals[ctx] = totals.get(ctx, 0) + c
        return totals

    def _check_fitted(self):
        if not hasattr(self, "languages_"):
            raise NotFittedError("identifier is not fitted; call fit() first")

    # -- scoring -----------------------------------------------------------
    def _logprob(self, lang: LangTag, order: int, gram: str) -> float:
        counts = self.ngram_counts_[lang][order]
        totals = self._context_totals[lang][order]
        ctx = gram[:-1]
        num = counts.get(gram, 0) + 1
        den = totals.get(ctx, 0) + self.vocab_size_
        return math.log(num / den)

    def log_score(self, word: str, lang: LangTag) -> float:
        """Sum of add-one-smoothed conditional log-probabilities, all orders."""
        self._check_fitted()
        word = "".join(ch if ch in self.alphabet_ else _UNK for ch in word.casefold())
        score = 0.0
        for order in self.orders:
            padded = _START * (order - 1) + word + _END
            for i in range(order - 1, len(padded)):
                score += self._logprob(lang, order, padded[i - order + 1 : i + 1])
        return score

    def classify_word(self, word: str) -> tuple[LangTag, float]:
        """Return (language, log-odds over the runner-up) for one word.

        A unique lexicon hit decides immediately with infinite odds; ties in
        the n-gram score break by the fixed language order.
        """
        self._check_fitted()
        if not word:
            raise ValueError("word must be non-empty")
        key = word.casefold()
        hits = [lang for lang in self.languages_ if key in self.lexicons_[lang]]
        if len(hits) == 1:
            return hits[0], math.inf

        scored = sorted(
            ((self.log_score(key, lang), lang) for lang in self.languages_),
            key=lambda item: (-item[0], self.languages_.index(item[1])),
        )
        log_odds = scored[0][0] - scored[1][0]
        if log_odds < self.ambiguity_margin:
            return LangTag.AMBIGUOUS, log_odds
        return scored[0][1], log_odds

    def predict(self, words: Sequence[str]) -> list[LangTag]:
        return [self.classify_word(w)[0] for w in words]

    # -- persistence -------------------------------------------------------
    def to_json(self) -> dict:
        self._check_fitted()
        return {
            "format": MODEL_FORMAT,
            "orders": list(self.orders),
            "ambiguity_margin": self.ambiguity_margin,
            "min_words": self.min_words,
            "languages": [lang.value for lang in self.languages_],
            "lexicons": {lang.value: sorted(self.lexicons_[lang]) for lang in self.languages_},
            "ngram_counts": {
                lang.value: {str(n): self.ngram_counts_[lang][n] for n in self.orders}
                for lang in self.languages_
            },
        }

    def save(self, path: str | Path) -> None:
        Path(path).write_text(
            json.dumps(self.to_json(), ensure_ascii=False, sort_keys=True), encoding="utf-8"
        )

    @classmethod
    def from_json(cls, obj: dict) -> "CharNgramLanguageIdentifier":
        if obj.get("format") != MODEL_FORMAT:
            raise ValueError(f"unsupported model format {obj.get('format')!r}")
        model = cls(
            orders=tuple(int(n) for n in obj["orders"]),
            ambiguity_margin=float(obj["ambiguity_margin"]),
            min_words=int(obj["min_words"]),
        )
        languages = tuple(LangTag(v) for v in obj["languages"])
        model.languages_ = languages
        model.lexicons_ = {lang: frozenset(obj["lexicons"][lang.value]) for lang in languages}
        model.ngram_counts_ = {
            lang: {int(n): dict(grams) for n, grams in obj["ngram_counts"][lang.value].items()}
            for lang in languages
        }
        alphabet: set[str] = set()
        for lang in languages:
            for w in model.lexicons_[lang]:
                alphabet.update(w)
        model.alphabet_ = frozenset(alphabet)
        model.vocab_size_ = len(alphabet) + 2
        model._context_totals = {
            lang: {n: cls._totals_for(model.ngram_counts_[lang][n], n) for n in model.orders}
            for lang in languages
        }
        return model

    @classmethod
    def load(cls, path: str | Path) -> "CharNgramLanguageIdentifier":
        return cls.from_json(json.loads(Path(path).read_text(encoding="utf-8")))


def train_langmodel(
    seed_corpora: Mapping[LangTag, Sequence[str]],
    ambiguity_margin: float = 0.5,
    min_words: int = 1000,
) -> CharNgramLanguageIdentifier:
    return CharNgramLanguageIdentifier(
        ambiguity_margin=ambiguity_margin, min_words=min_words
    ).fit(seed_corpora)


def classify_word(model: CharNgramLanguageIdentifier, word: str) -> tuple[LangTag, float]:
    return model.classify_word(word)


def tag_utterance(model: CharNgramLanguageIdentifier, utt: Utterance) -> Utterance:
    """Fill in language tags for unmarked tokens; explicit tags never change."""
    tokens: list[Token] = []
    for token in utt.tokens:
        if token.explicit:
            tokens.append(token)
        elif token.is_punct():
            tokens.append(Token(text=token.text, lang=LangTag.OTHER, explicit=False))
        else:
            lang, _ = model.classify_word(token.text)
            tokens.append(Token(text=token.text, lang=lang, explicit=False))
    return retag_utterance(utt, tokens)
