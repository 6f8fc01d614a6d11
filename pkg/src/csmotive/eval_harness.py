"""Experimental protocol: conversation-level test split, 75/25 train/dev,
per-label grid search on dev with the first seed, then a multi-seed rerun
of the winning configuration on test, reported as mean ± sample std.
"""

from __future__ import annotations

import json
import math
import random
import statistics
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Protocol, Sequence

from .classification import Prediction, nb_train
from .errors import IdMismatch, UnknownConversation
from .remote import GRID_BATCH_SIZES, GRID_LEARNING_RATES, RemoteBackendConfig, remote_train_predict
from .switch_extractor import SwitchInstance

DEFAULT_SEEDS = (42, 30, 20, 10, 5)


@dataclass(frozen=True)
class SplitSpec:
    test_conversation_ids: tuple[str, ...]
    dev_fraction: float = 0.25
    shuffle_seed: int = 42

    def __post_init__(self):
        if not 0 < self.dev_fraction < 1:
            raise ValueError("dev_fraction must be in (0, 1)")

    def to_json(self) -> dict:
        return {
            "test_conversation_ids": list(self.test_conversation_ids),
            "dev_fraction": self.dev_fraction,
            "shuffle_seed": self.shuffle_seed,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "SplitSpec":
        return cls(
            test_conversation_ids=tuple(obj["test_conversation_ids"]),
            dev_fraction=float(obj.get("dev_fraction", 0.25)),
            shuffle_seed=int(obj.get("shuffle_seed", 42)),
        )

    def save(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_json(), indent=2, sort_keys=True) + "\n")

    @classmethod
    def load(cls, path: str | Path) -> "SplitSpec":
        return cls.from_json(json.loads(Path(path).read_text(encoding="utf-8")))


def make_splits(
    instances: Sequence[SwitchInstance], spec: SplitSpec
) -> tuple[list[SwitchInstance], list[SwitchInstance], list[SwitchInstance]]:
    """Whole-conversation test split, then a seeded 75/25 train/dev shuffle."""
    seen_conversations = {inst.transcript_id for inst in instances}
    for cid in spec.test_conversation_ids:
        if cid not in seen_conversations:
            raise UnknownConversation(cid)

    test_ids = set(spec.test_conversation_ids)
    test = [inst for inst in instances if inst.transcript_id in test_ids]
    rest = sorted(
        (inst for inst in instances if inst.transcript_id not in test_ids),
        key=lambda inst: inst.id,
    )
    rng = random.Random(spec.shuffle_seed)
    rng.shuffle(rest)
    n_dev = int(len(rest) * spec.dev_fraction)
    dev = sorted(rest[:n_dev], key=lambda inst: inst.id)
    train = sorted(rest[n_dev:], key=lambda inst: inst.id)
    test = sorted(test, key=lambda inst: inst.id)
    return train, dev, test


def accuracy(predictions: Sequence[Prediction], gold: Sequence[SwitchInstance], label: str) -> float:
    """Fraction of instances whose decision equals the gold boolean."""
    gold_by_id: dict[str, SwitchInstance] = {}
    for inst in gold:
        if inst.id in gold_by_id:
            raise IdMismatch(f"duplicate gold id {inst.id!r}")
        gold_by_id[inst.id] = inst
    pred_ids = [p.instance_id for p in predictions]
    if sorted(pred_ids) != sorted(gold_by_id):
        raise IdMismatch("prediction ids are not bijective with gold ids")
    correct = 0
    for pred in predictions:
        inst = gold_by_id[pred.instance_id]
        if inst.labels is None or label not in inst.labels:
            raise IdMismatch(f"gold instance {inst.id!r} has no value for label {label!r}")
        correct += pred.decision == bool(inst.labels[label])
    return correct / len(predictions) if predictions else 0.0


class Backend(Protocol):
    name: str
    grid: list[dict]

    def train_predict(
        self,
        label: str,
        hyperparams: Mapping,
        seed: int,
        train: Sequence[SwitchInstance],
        dev: Sequence[SwitchInstance],
        test: Sequence[SwitchInstance],
    ) -> list[Prediction]:
        ...


class NBBackend:
    """Native Naive Bayes backend; deterministic, so seeds never change results."""

    name = "nb"

    def __init__(self, alphas: Sequence[float] = (1.0,)):
        self.grid = [{"alpha": float(a)} for a in alphas]

    def train_predict(self, label, hyperparams, seed, train, dev, test):
        model = nb_train(train, label=label, alpha=hyperparams["alpha"])
        return [model.predict_one(inst) for inst in test]


class RemoteBackend:
    """Delegates fine-tuning to a model server over the wire contract."""

    def __init__(self, endpoint: str, model_name: str, cache_path: str | None = None):
        self.endpoint = endpoint
        self.model_name = model_name
        self.cache_path = cache_path
        self.name = f"remote:{model_name}"
        self.grid = [
            {"batch_size": b, "learning_rate": lr}
            for b in GRID_BATCH_SIZES
            for lr in GRID_LEARNING_RATES
        ]

    def train_predict(self, label, hyperparams, seed, train, dev, test):
        config = RemoteBackendConfig(
            endpoint=self.endpoint,
            model_name=self.model_name,
            batch_size=hyperparams["batch_size"],
            learning_rate=hyperparams["learning_rate"],
            seed=seed,
            cache_path=self.cache_path,
        )
        return remote_train_predict(config, label, train, dev, test)


def _tie_key(hyperparams: Mapping) -> tuple:
    # deterministic preference: smaller batch size, then smaller learning rate
    if "batch_size" in hyperparams:
        return (hyperparams["batch_size"], hyperparams.get("learning_rate", 0.0))
    return tuple(sorted(hyperparams.items()))


@dataclass(frozen=True)
class EvalRow:
    label: str
    backend: str
    hyperparams: dict
    seeds: tuple[int, ...]
    accuracies: tuple[float, ...]
    dev_accuracy: float | None = None

    @property
    def mean(self) -> float:
        return sum(self.accuracies) / len(self.accuracies)

    @property
    def std(self) -> float:
        if len(self.accuracies) < 2:
            return 0.0
        return statistics.stdev(self.accuracies)

    @property
    def n_runs(self) -> int:
        return len(self.accuracies)

    def to_json(self) -> dict:
        return {
            "label": self.label,
            "backend": self.backend,
            "hyperparams": self.hyperparams,
            "seeds": list(self.seeds),
            "accuracies": list(self.accuracies),
            "accuracy_mean": self.mean,
            "accuracy_std": self.std,
            "n_runs": self.n_runs,
            "dev_accuracy": self.dev_accuracy,
        }


def run_experiment(
    backend: Backend,
    label: str,
    train: Sequence[SwitchInstance],
    dev: Sequence[SwitchInstance],
    test: Sequence[SwitchInstance],
    grid: Sequence[Mapping] | None = None,
    seeds: Sequence[int] = DEFAULT_SEEDS,
) -> EvalRow:
    """Grid-select on dev with the first seed, rerun the winner on every seed."""
    grid = list(grid if grid is not None else backend.grid)
    if not grid:
        raise ValueError("hyperparameter grid is empty")
    seeds = tuple(seeds)

    if len(grid) == 1:
        best, best_dev = dict(grid[0]), None
    else:
        scored = []
        for hyperparams in grid:
            dev_preds = backend.train_predict(label, hyperparams, seeds[0], train, dev, dev)
            scored.append((accuracy(dev_preds, dev, label), dict(hyperparams)))
        scored.sort(key=lambda item: (-item[0], _tie_key(item[1])))
        best_dev, best = scored[0]

    accuracies = []
    for seed in seeds:
        preds = backend.train_predict(label, best, seed, train, dev, test)
        accuracies.append(accuracy(preds, test, label))

    return EvalRow(
        label=label,
        backend=backend.name,
        hyperparams=best,
        seeds=seeds,
        accuracies=tuple(accuracies),
        dev_accuracy=best_dev,
    )


def format_cell(mean: float, std: float) -> str:
    """Render an accuracy cell exactly as reported: "86.3 ± 0.9"."""
    return f"{100 * mean:.1f} ± {100 * std:.1f}"


@dataclass(frozen=True)
class EvalReport:
    rows: tuple[EvalRow, ...]
    language_pair: str = "es-en"
    stddev_kind: str = "sample (n-1)"

    def average_mean(self) -> float:
        return sum(row.mean for row in self.rows) / len(self.rows)

    def average_std(self) -> float:
        """Std over seeds of the per-seed label-average accuracy.

        Falls back to the mean of per-row stds when rows do not share one
        seed list (e.g. rows imported from external results).
        """
        seed_sets = {row.seeds for row in self.rows}
        if len(seed_sets) == 1:
            seeds = next(iter(seed_sets))
            if len(seeds) >= 2:
                per_seed = [
                    sum(row.accuracies[k] for row in self.rows) / len(self.rows)
                    for k in range(len(seeds))
                ]
                return statistics.stdev(per_seed)
            return 0.0
        return sum(row.std for row in self.rows) / len(self.rows)

    def to_json(self) -> dict:
        return {
            "language_pair": self.language_pair,
            "stddev_kind": self.stddev_kind,
            "rows": [row.to_json() for row in self.rows],
            "average": {
                "accuracy_mean": self.average_mean(),
                "accuracy_std": self.average_std(),
            },
        }


def render_report(report: EvalReport) -> tuple[str, str]:
    """Return (text table, canonical JSON) renderings of a report."""
    width = max(len("Average"), *(len(row.label) for row in report.rows)) + 2
    lines = [
        f"Label detection accuracy ({report.language_pair})",
        f"backend: {report.rows[0].backend}   seeds: {list(report.rows[0].seeds)}   "
        f"std: {report.stddev_kind}",
        "",
        f"{'Label':<{width}}Accuracy",
        f"{'-' * (width - 2):<{width}}{'-' * 12}",
    ]
    for row in report.rows:
        lines.append(f"{row.label:<{width}}{format_cell(row.mean, row.std)}")
    lines.append(f"{'Average':<{width}}{format_cell(report.average_mean(), report.average_std())}")
    text = "\n".join(lines) + "\n"
    machine = json.dumps(report.to_json(), indent=2, sort_keys=True, ensure_ascii=False) + "\n"
    return text, machine


def write_report(report: EvalReport, text_path: str | Path, json_path: str | Path) -> None:
    text, machine = render_report(report)
    Path(text_path).write_text(text, encoding="utf-8")
    Path(json_path).write_text(machine, encoding="utf-8")
