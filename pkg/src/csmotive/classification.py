"""Per-label binary Naive Bayes classification of switch instances.

One independent multinomial model per motivation label, over lowercased
unigram counts from the full context window. Smoothing reserves one
extra vocabulary slot so unseen tokens keep a finite likelihood.
"""

from __future__ import annotations

import json
import math
from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

from sklearn.base import BaseEstimator
from sklearn.exceptions import NotFittedError

from .errors import SingleClassTrainingSet
from .switch_extractor import SwitchInstance

MODEL_FORMAT = "csmotive-nb/1"


@dataclass(frozen=True)
class Prediction:
    instance_id: str
    label: str
    decision: bool
    score: float  # positive-class posterior

    def to_json(self) -> dict:
        return {
            "id": self.instance_id,
            "label": self.label,
            "decision": self.decision,
            "score": self.score,
        }


def featurize(instance: SwitchInstance) -> Counter:
    """Lowercased unigram counts over every context token except punctuation."""
    bag: Counter = Counter()
    for utt in instance.context:
        for token in utt.tokens:
            if token.is_punct():
                continue
            bag[token.text.lower()] += 1
    return bag


class NaiveBayesLabelClassifier(BaseEstimator):
    """Binary multinomial NB for one motivation label.

    sklearn-style: hyperparameters in __init__, fitted state in
    trailing-underscore attributes, fit returns self.
    """

    def __init__(self, label: str = "", alpha: float = 1.0):
        self.label = label
        self.alpha = alpha

    def fit(self, instances: Sequence[SwitchInstance], y: Sequence[bool] | None = None):
        if self.alpha <= 0:
            raise ValueError("alpha must be > 0")
        instances = list(instances)
        if not instances:
            raise ValueError("training set is empty")
        if y is None:
            y = [self._gold(inst) for inst in instances]
        y = [bool(v) for v in y]
        if len(y) != len(instances):
            raise ValueError("labels and instances differ in length")
        if len(set(y)) < 2:
            raise SingleClassTrainingSet(self.label)

        counts = {True: Counter(), False: Counter()}
        n_docs = {True: 0, False: 0}
        for inst, label in zip(instances, y):
            counts[label].update(featurize(inst))
            n_docs[label] += 1

        vocab = sorted(set(counts[True]) | set(counts[False]))
        self.vocab_ = {tok: i for i, tok in enumerate(vocab)}
        denom = {}
        self.class_log_prior_ = {}
        self.feature_log_prob_ = {}
        self.unseen_log_prob_ = {}
        for cls in (True, False):
            total = sum(counts[cls].values())
            denom[cls] = total + self.alpha * (len(vocab) + 1)
            self.class_log_prior_[cls] = math.log(n_docs[cls] / len(instances))
            self.feature_log_prob_[cls] = [
                math.log((counts[cls][tok] + self.alpha) / denom[cls]) for tok in vocab
            ]
            self.unseen_log_prob_[cls] = math.log(self.alpha / denom[cls])
        return self

    def _gold(self, instance: SwitchInstance) -> bool:
        if instance.labels is None or self.label not in instance.labels:
            raise ValueError(f"instance {instance.id} carries no gold value for {self.label!r}")
        return bool(instance.labels[self.label])

    def _check_fitted(self):
        if not hasattr(self, "vocab_"):
            raise NotFittedError("classifier is not fitted; call fit() first")

    def _log_joint(self, bag: Counter, cls: bool) -> float:
        score = self.class_log_prior_[cls]
        for tok, count in bag.items():
            idx = self.vocab_.get(tok)
            lp = self.feature_log_prob_[cls][idx] if idx is not None else self.unseen_log_prob_[cls]
            score += count * lp
        return score

    def predict_one(self, instance: SwitchInstance) -> Prediction:
        self._check_fitted()
        bag = featurize(instance)
        log_pos = self._log_joint(bag, True)
        log_neg = self._log_joint(bag, False)
        # stable normalization of the two-class posterior
        if log_pos >= log_neg:
            score = 1.0 / (1.0 + math.exp(log_neg - log_pos))
        else:
            e = math.exp(log_pos - log_neg)
            score = e / (1.0 + e)
        return Prediction(
            instance_id=instance.id,
            label=self.label,
            decision=score >= 0.5,
            score=score,
        )

    def predict(self, instances: Sequence[SwitchInstance]) -> list[bool]:
        return [self.predict_one(inst).decision for inst in instances]

    def predict_proba(self, instances: Sequence[SwitchInstance]) -> list[float]:
        return [self.predict_one(inst).score for inst in instances]

    # -- persistence -------------------------------------------------------
    def to_json(self) -> dict:
        self._check_fitted()
        vocab = sorted(self.vocab_, key=self.vocab_.get)
        return {
            "format": MODEL_FORMAT,
            "label": self.label,
            "alpha": self.alpha,
            "vocab": vocab,
            "class_log_prior": {"pos": self.class_log_prior_[True], "neg": self.class_log_prior_[False]},
            "feature_log_prob": {"pos": self.feature_log_prob_[True], "neg": self.feature_log_prob_[False]},
            "unseen_log_prob": {"pos": self.unseen_log_prob_[True], "neg": self.unseen_log_prob_[False]},
        }

    def save(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_json(), ensure_ascii=False), encoding="utf-8")

    @classmethod
    def from_json(cls, obj: dict) -> "NaiveBayesLabelClassifier":
        if obj.get("format") != MODEL_FORMAT:
            raise ValueError(f"unsupported model format {obj.get('format')!r}")
        model = cls(label=obj["label"], alpha=float(obj["alpha"]))
        model.vocab_ = {tok: i for i, tok in enumerate(obj["vocab"])}
        model.class_log_prior_ = {True: obj["class_log_prior"]["pos"], False: obj["class_log_prior"]["neg"]}
        model.feature_log_prob_ = {True: obj["feature_log_prob"]["pos"], False: obj["feature_log_prob"]["neg"]}
        model.unseen_log_prob_ = {True: obj["unseen_log_prob"]["pos"], False: obj["unseen_log_prob"]["neg"]}
        return model

    @classmethod
    def load(cls, path: str | Path) -> "NaiveBayesLabelClassifier":
        return cls.from_json(json.loads(Path(path).read_text(encoding="utf-8")))


def nb_train(
    train: Iterable[SwitchInstance],
    label: str,
    alpha: float = 1.0,
    y: Sequence[bool] | None = None,
) -> NaiveBayesLabelClassifier:
    """Train one per-label binary model from labeled instances."""
    return NaiveBayesLabelClassifier(label=label, alpha=alpha).fit(list(train), y=y)


def nb_predict(model: NaiveBayesLabelClassifier, instance: SwitchInstance) -> Prediction:
    return model.predict_one(instance)
