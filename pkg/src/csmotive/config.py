"""Project configuration: one JSON or TOML document, env-overridable.

Validation is fail-fast and exhaustive: every problem is collected and
reported in a single ConfigError rather than one at a time.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from pathlib import Path

from .annotation import SCHEMA_VERSION
from .errors import ConfigError

ENV_VAR = "CSMOTIVE_CONFIG"


@dataclass
class ProjectConfig:
    instances_path: Path
    annotations_path: Path
    schema_version: str = SCHEMA_VERSION
    lexicons: dict[str, Path] = field(default_factory=dict)
    splits_path: Path | None = None
    annotators: list[str] = field(default_factory=list)
    port: int = 8377
    translation_client: str = "identity"
    translation_cache: Path | None = None
    subsets: dict[str, Path] = field(default_factory=dict)
    ui_dir: Path | None = None

    def validate(self) -> None:
        problems: list[str] = []
        if not self.instances_path.exists():
            problems.append(f"instances file not found: {self.instances_path}")
        if not self.annotations_path.parent.exists():
            problems.append(f"annotations directory not found: {self.annotations_path.parent}")
        if self.schema_version != SCHEMA_VERSION:
            problems.append(
                f"schema version {self.schema_version!r} does not match toolkit {SCHEMA_VERSION!r}"
            )
        for lang, path in self.lexicons.items():
            if not path.exists():
                problems.append(f"lexicon for {lang} not found: {path}")
        if self.splits_path is not None and not self.splits_path.exists():
            problems.append(f"splits file not found: {self.splits_path}")
        for name, path in self.subsets.items():
            if not path.exists():
                problems.append(f"subset {name!r} file not found: {path}")
        if self.ui_dir is not None and not self.ui_dir.is_dir():
            problems.append(f"ui directory not found: {self.ui_dir}")
        if not 0 < self.port < 65536:
            problems.append(f"port out of range: {self.port}")
        if problems:
            raise ConfigError(problems)


def _parse_document(path: Path) -> dict:
    text = path.read_text(encoding="utf-8")
    if path.suffix == ".toml":
        try:
            import tomllib  # Python 3.11+
        except ModuleNotFoundError as exc:
            raise ConfigError([f"TOML config needs Python 3.11+; use JSON: {path}"]) from exc
        return tomllib.loads(text)
    return json.loads(text)


def load_config(path: str | Path | None = None) -> ProjectConfig:
    """Load and validate the project config; CSMOTIVE_CONFIG overrides the path."""
    env = os.environ.get(ENV_VAR)
    if env:
        path = env
    if path is None:
        raise ConfigError(["no config path given and CSMOTIVE_CONFIG is unset"])
    path = Path(path)
    if not path.exists():
        raise ConfigError([f"config file not found: {path}"])
    doc = _parse_document(path)
    base = path.parent

    def resolve(value: str | None) -> Path | None:
        if value is None:
            return None
        p = Path(value)
        return p if p.is_absolute() else base / p

    config = ProjectConfig(
        instances_path=resolve(doc.get("instances_path", "instances.jsonl")),
        annotations_path=resolve(doc.get("annotations_path", "annotations.jsonl")),
        schema_version=doc.get("schema_version", SCHEMA_VERSION),
        lexicons={k: resolve(v) for k, v in doc.get("lexicons", {}).items()},
        splits_path=resolve(doc.get("splits_path")),
        annotators=list(doc.get("annotators", [])),
        port=int(doc.get("port", 8377)),
        translation_client=doc.get("translation_client", "identity"),
        translation_cache=resolve(doc.get("translation_cache")),
        subsets={k: resolve(v) for k, v in doc.get("subsets", {}).items()},
        ui_dir=resolve(doc.get("ui_dir")),
    )
    config.validate()
    return config
