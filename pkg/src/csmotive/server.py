"""HTTP API backing the annotation UI.

The server is a thin JSON layer over the annotation store and agreement
functions; instances are read-only, only annotation records are written.
Every annotator sees the same deterministic instance queue (id order).
"""

from __future__ import annotations

import json
from pathlib import Path

from fastapi import Body, FastAPI, HTTPException, Query
from fastapi.staticfiles import StaticFiles

from .annotation import (
    LABEL_KEYS,
    SCHEMA,
    AnnotationRecord,
    AnnotationStore,
    LabelSet,
    agreement_accuracy,
    agreement_kappa,
)
from .config import ProjectConfig
from .errors import MissingRecord
from .switch_extractor import read_instances_jsonl


def _load_subsets(config: ProjectConfig) -> dict[str, list[str]]:
    subsets = {}
    for name, path in config.subsets.items():
        ids = [line.strip() for line in Path(path).read_text(encoding="utf-8").splitlines()]
        subsets[name] = [i for i in ids if i]
    return subsets


def create_app(config: ProjectConfig) -> FastAPI:
    instances = {inst.id: inst for inst in read_instances_jsonl(config.instances_path)}
    queue = sorted(instances)  # deterministic ordering shared by all annotators
    store = AnnotationStore(config.annotations_path)
    subsets = _load_subsets(config)

    app = FastAPI(title="csmotive annotation API")

    @app.get("/api/schema")
    def get_schema():
        return SCHEMA.to_json()

    @app.get("/api/instances")
    def list_instances(annotator: str | None = Query(default=None),
                       status: str = Query(default="all")):
        if status not in ("all", "unlabeled"):
            raise HTTPException(status_code=400, detail=f"unknown status {status!r}")
        items = []
        for iid in queue:
            record = store.get(iid, annotator) if annotator else None
            if status == "unlabeled" and annotator and record is not None:
                continue
            items.append({
                "id": iid,
                "text": instances[iid].text,
                "labeled": record is not None,
            })
        return {"instances": items, "total": len(queue)}

    @app.get("/api/instances/{instance_id}")
    def get_instance(instance_id: str, annotator: str | None = Query(default=None)):
        inst = instances.get(instance_id)
        if inst is None:
            raise HTTPException(status_code=404, detail=f"unknown instance {instance_id!r}")
        record = store.get(instance_id, annotator) if annotator else None
        return {
            "instance": inst.to_json(),
            "record": record.to_json() if record else None,
        }

    @app.post("/api/annotations")
    def post_annotation(body: dict = Body(...)):
        for key in ("instance_id", "annotator_id", "labels"):
            if key not in body:
                raise HTTPException(status_code=400, detail=f"missing field {key!r}")
        if body["instance_id"] not in instances:
            raise HTTPException(status_code=404, detail=f"unknown instance {body['instance_id']!r}")
        version = body.get("schema_version", SCHEMA.version)
        if version != SCHEMA.version:
            raise HTTPException(
                status_code=409,
                detail=f"schema version mismatch: server {SCHEMA.version}, got {version}",
            )
        labels = body["labels"]
        if not isinstance(labels, dict) or set(labels) != set(LABEL_KEYS) or not all(
            isinstance(v, bool) for v in labels.values()
        ):
            raise HTTPException(
                status_code=400,
                detail=f"labels must map exactly the {len(LABEL_KEYS)} schema keys to booleans",
            )
        record = AnnotationRecord(
            instance_id=body["instance_id"],
            annotator_id=body["annotator_id"],
            labels=LabelSet.from_mapping(labels),
        )
        store.submit(record)
        return record.to_json()

    @app.get("/api/agreement")
    def get_agreement(a: str, b: str, subset: str):
        ids = subsets.get(subset)
        if ids is None:
            raise HTTPException(status_code=404, detail=f"unknown subset {subset!r}")
        missing = [
            {"instance_id": iid, "annotator_id": who}
            for iid in ids
            for who in (a, b)
            if store.get(iid, who) is None
        ]
        if missing:
            return {"complete": False, "missing": missing, "n_instances": len(ids)}
        per_label = {}
        for label in LABEL_KEYS:
            per_label[label] = {
                "accuracy": agreement_accuracy(store, a, b, label, ids),
                "kappa": agreement_kappa(store, a, b, label, ids),
            }
        return {"complete": True, "per_label": per_label, "n_instances": len(ids)}

    @app.get("/api/progress")
    def get_progress(annotator: str):
        completed = sum(1 for iid in queue if store.get(iid, annotator) is not None)
        return {
            "annotator": annotator,
            "completed": completed,
            "remaining": len(queue) - completed,
            "total": len(queue),
        }

    if config.ui_dir is not None and Path(config.ui_dir).is_dir():
        app.mount("/ui", StaticFiles(directory=str(config.ui_dir), html=True), name="ui")

    return app
