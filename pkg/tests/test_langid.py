import math
import random

import pytest
from sklearn.exceptions import NotFittedError

from csmotive.chat_parser import LangTag, Token, Utterance
from csmotive.errors import InsufficientSeed
from csmotive.langid import (
    CharNgramLanguageIdentifier,
    bundled_seed_corpora,
    classify_word,
    tag_utterance,
    train_langmodel,
)


@pytest.fixture(scope="module")
def bundled_model():
    return train_langmodel(bundled_seed_corpora())


def test_separable_single_word_corpora():
    model = train_langmodel(
        {LangTag.ENG: ["aaa"], LangTag.SPA: ["bbb"]}, min_words=1
    )
    assert model.classify_word("aaa")[0] is LangTag.ENG
    assert model.classify_word("bbb")[0] is LangTag.SPA


def test_empty_corpus_raises_insufficient_seed():
    with pytest.raises(InsufficientSeed) as exc:
        train_langmodel({LangTag.ENG: ["aaa"], LangTag.SPA: []}, min_words=1)
    assert exc.value.lang == "spa"


def test_default_threshold_rejects_small_corpora():
    with pytest.raises(InsufficientSeed):
        train_langmodel({LangTag.ENG: ["a"] * 10, LangTag.SPA: ["b"] * 10})


def test_unfitted_raises():
    with pytest.raises(NotFittedError):
        CharNgramLanguageIdentifier().classify_word("hola")


def test_lexicon_lookups(bundled_model):
    assert bundled_model.classify_word("olvídate")[0] is LangTag.SPA
    assert bundled_model.classify_word("trainers")[0] is LangTag.ENG
    lang, odds = bundled_model.classify_word("Olvídate")  # case-insensitive
    assert lang is LangTag.SPA and odds == math.inf


def test_word_in_both_lexicons_with_small_margin_is_ambiguous():
    corpus1 = ["shared"] + [f"en{i}" for i in range(30)]
    corpus2 = ["shared"] + [f"es{i}" for i in range(30)]
    model = CharNgramLanguageIdentifier(ambiguity_margin=50.0, min_words=1).fit(
        {LangTag.ENG: corpus1, LangTag.SPA: corpus2}
    )
    lang, odds = model.classify_word("shared")
    assert lang is LangTag.AMBIGUOUS
    assert odds < 50.0


def test_determinism(bundled_model):
    results = {bundled_model.classify_word("zanahoria") for _ in range(5)}
    assert len(results) == 1


def test_tie_breaks_by_language_order():
    # symmetric corpora make every unseen word score identically
    model = CharNgramLanguageIdentifier(ambiguity_margin=0.0, min_words=1).fit(
        {LangTag.ENG: ["xyxy"], LangTag.SPA: ["xyxy"]}
    )
    lang, odds = model.classify_word("qq")
    assert odds == 0.0
    assert lang is LangTag.ENG  # ENG precedes SPA in the fixed order


def test_conditional_probabilities_sum_to_one(bundled_model):
    lang = LangTag.SPA
    symbols = sorted(bundled_model.alphabet_) + ["\x03", "\x04"]
    for ctx in ["\x02\x02", "ca", "qu"]:
        total = sum(
            math.exp(bundled_model._logprob(lang, 3, ctx + s)) for s in symbols
        )
        assert total == pytest.approx(1.0, abs=1e-9)


def test_tag_utterance_borrowing_example(bundled_model):
    words = ["Mi", "amiga", "de", "high", "school", "va", "a", "casarse"]
    utt = Utterance(speaker="ANA", tokens=tuple(Token(text=w) for w in words), line_no=1)
    tagged = tag_utterance(bundled_model, utt)
    expected = [LangTag.SPA, LangTag.SPA, LangTag.SPA, LangTag.ENG, LangTag.ENG,
                LangTag.SPA, LangTag.SPA, LangTag.SPA]
    assert [t.lang for t in tagged.tokens] == expected


def test_tag_utterance_preserves_explicit_and_punct(bundled_model):
    utt = Utterance(
        speaker="ANA",
        tokens=(
            Token(text="trainers", lang=LangTag.SPA, explicit=True),  # deliberately odd
            Token(text="!"),
        ),
        line_no=1,
    )
    tagged = tag_utterance(bundled_model, utt)
    assert tagged.tokens[0].lang is LangTag.SPA  # explicit never overridden
    assert tagged.tokens[1].lang is LangTag.OTHER


def test_tag_utterance_all_explicit_unchanged(bundled_model):
    utt = Utterance(
        speaker="ANA",
        tokens=(
            Token(text="hola", lang=LangTag.SPA, explicit=True),
            Token(text="friend", lang=LangTag.ENG, explicit=True),
        ),
        line_no=2,
    )
    assert tag_utterance(bundled_model, utt) == utt


def test_heldout_accuracy_at_least_90_percent():
    corpora = bundled_seed_corpora([LangTag.ENG, LangTag.SPA])
    rng = random.Random(42)
    train: dict[LangTag, list[str]] = {}
    heldout: list[tuple[str, LangTag]] = []
    for lang, words in corpora.items():
        words = sorted(words)
        rng.shuffle(words)
        cut = max(1, len(words) // 10)
        heldout.extend((w, lang) for w in words[:cut])
        train[lang] = words[cut:]
    model = CharNgramLanguageIdentifier(ambiguity_margin=0.0, min_words=1).fit(train)
    correct = sum(model.classify_word(w)[0] is lang for w, lang in heldout)
    accuracy = correct / len(heldout)
    assert accuracy >= 0.90, f"held-out accuracy {accuracy:.3f}"


def test_model_round_trips_through_json(tmp_path, bundled_model):
    path = tmp_path / "model.json"
    bundled_model.save(path)
    loaded = CharNgramLanguageIdentifier.load(path)
    for word in ["olvídate", "anything", "qqq", "casarse"]:
        assert loaded.classify_word(word) == bundled_model.classify_word(word)


def test_classify_word_function_alias(bundled_model):
    assert classify_word(bundled_model, "amiga")[0] is LangTag.SPA
