"""HTTP contract for transformer backends.

Fine-tuning happens on an external model server; this module only speaks
the wire protocol (POST /train_predict), validates responses, and caches
them keyed by configuration + data hash so repeated experiments never
retrain.
"""

from __future__ import annotations

import hashlib
import json
import threading
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import requests

from .classification import Prediction
from .errors import BackendProtocolError, BackendUnavailable
from .switch_extractor import SwitchInstance

GRID_BATCH_SIZES = (4, 16)
GRID_LEARNING_RATES = (2e-05, 1e-4)
EPOCHS = 20
WEIGHT_DECAY = 0.01
MODEL_NAMES = ("mbert", "mbert+adapter", "xlmr", "xlmr+adapter")


@dataclass(frozen=True)
class RemoteBackendConfig:
    endpoint: str
    model_name: str
    batch_size: int = 4
    learning_rate: float = 2e-05
    epochs: int = EPOCHS
    weight_decay: float = WEIGHT_DECAY
    seed: int = 42
    cache_path: str | None = None
    timeout: float = 120.0

    def __post_init__(self):
        if self.batch_size not in GRID_BATCH_SIZES:
            raise ValueError(f"batch_size must be one of {GRID_BATCH_SIZES}")
        if self.learning_rate not in GRID_LEARNING_RATES:
            raise ValueError(f"learning_rate must be one of {GRID_LEARNING_RATES}")
        if self.epochs != EPOCHS:
            raise ValueError(f"epochs is fixed at {EPOCHS}")
        if self.weight_decay != WEIGHT_DECAY:
            raise ValueError(f"weight_decay is fixed at {WEIGHT_DECAY}")

    def hyperparams(self) -> dict:
        return {
            "model_name": self.model_name,
            "batch_size": self.batch_size,
            "learning_rate": self.learning_rate,
            "epochs": self.epochs,
            "weight_decay": self.weight_decay,
        }


def _item(inst: SwitchInstance, label: str, with_gold: bool) -> dict:
    obj = {"id": inst.id, "text": inst.text}
    if with_gold:
        if inst.labels is None or label not in inst.labels:
            raise ValueError(f"instance {inst.id} carries no gold value for {label!r}")
        obj["label"] = bool(inst.labels[label])
    return obj


def _request_body(
    config: RemoteBackendConfig,
    label: str,
    train: Sequence[SwitchInstance],
    dev: Sequence[SwitchInstance],
    test: Sequence[SwitchInstance],
) -> dict:
    return {
        "label": label,
        "hyperparams": config.hyperparams(),
        "seed": config.seed,
        "train": [_item(i, label, True) for i in train],
        "dev": [_item(i, label, True) for i in dev],
        "test": [_item(i, label, False) for i in test],
    }


def _cache_key(config: RemoteBackendConfig, body: dict) -> str:
    payload = {
        "endpoint": config.endpoint,
        "body": body,
    }
    blob = json.dumps(payload, sort_keys=True, ensure_ascii=False).encode("utf-8")
    return hashlib.sha256(blob).hexdigest()


class _ResponseCache:
    _locks: dict[str, threading.Lock] = {}
    _guard = threading.Lock()

    def __init__(self, path: str | Path):
        self.path = Path(path)
        with _ResponseCache._guard:
            self._lock = _ResponseCache._locks.setdefault(str(self.path), threading.Lock())

    def get(self, key: str) -> list[dict] | None:
        if not self.path.exists():
            return None
        data = json.loads(self.path.read_text(encoding="utf-8"))
        return data.get(key)

    def put(self, key: str, predictions: list[dict]) -> None:
        with self._lock:
            data = {}
            if self.path.exists():
                data = json.loads(self.path.read_text(encoding="utf-8"))
            data[key] = predictions
            tmp = self.path.with_suffix(".tmp")
            tmp.write_text(json.dumps(data, sort_keys=True, ensure_ascii=False), encoding="utf-8")
            tmp.replace(self.path)


def _validate_predictions(raw: object, label: str, test_ids: list[str]) -> list[Prediction]:
    if not isinstance(raw, dict) or not isinstance(raw.get("predictions"), list):
        raise BackendProtocolError("response is missing a 'predictions' array")
    by_id: dict[str, Prediction] = {}
    for item in raw["predictions"]:
        if not isinstance(item, dict) or not {"id", "score", "decision"} <= set(item):
            raise BackendProtocolError(f"malformed prediction item: {item!r}")
        score = float(item["score"])
        if not 0.0 <= score <= 1.0:
            raise BackendProtocolError(f"score out of range for id {item['id']!r}: {score}")
        by_id[str(item["id"])] = Prediction(
            instance_id=str(item["id"]),
            label=label,
            decision=bool(item["decision"]),
            score=score,
        )
    missing = [iid for iid in test_ids if iid not in by_id]
    if missing:
        raise BackendProtocolError(f"response missing test ids: {missing[:5]}")
    extra = set(by_id) - set(test_ids)
    if extra:
        raise BackendProtocolError(f"response has unknown ids: {sorted(extra)[:5]}")
    return [by_id[iid] for iid in test_ids]


def remote_train_predict(
    config: RemoteBackendConfig,
    label: str,
    train: Sequence[SwitchInstance],
    dev: Sequence[SwitchInstance],
    test: Sequence[SwitchInstance],
) -> list[Prediction]:
    """Train remotely and predict the test set; cached responses skip the network."""
    body = _request_body(config, label, train, dev, test)
    test_ids = [i.id for i in test]

    cache = _ResponseCache(config.cache_path) if config.cache_path else None
    key = _cache_key(config, body)
    if cache is not None:
        hit = cache.get(key)
        if hit is not None:
            return _validate_predictions({"predictions": hit}, label, test_ids)

    url = config.endpoint.rstrip("/") + "/train_predict"
    try:
        response = requests.post(url, json=body, timeout=config.timeout)
    except requests.RequestException as exc:
        raise BackendUnavailable(config.endpoint, str(exc)) from exc
    if response.status_code != 200:
        raise BackendProtocolError(f"HTTP {response.status_code}: {response.text[:200]}")
    try:
        raw = response.json()
    except ValueError as exc:
        raise BackendProtocolError(f"response is not JSON: {exc}") from exc

    predictions = _validate_predictions(raw, label, test_ids)
    if cache is not None:
        cache.put(key, [p.to_json() for p in predictions])
    return predictions
