"""
Experiment bundles: canonical JSON files holding the artifacts of a run.

Layout (schema_version 1):

    {
      "schema_version": 1,
      "tool_version": "...",
      "created_at": "YYYY-MM-DDTHH:MM:SSZ",
      "map": {"source": "...", "params": {"name": [re, im]}},
      "artifacts": [
        {"name": ..., "kind": ..., "operation": ..., "inputs": {...}, "payload": {...}}
      ]
    }
"""

import json
import logging
import math
import os
from dataclasses import dataclass, field
from datetime import datetime, timezone
from enum import Enum
from pathlib import Path
from typing import Any, Dict, List

import numpy as np

from src import __version__
from src.core.errors import BundleSchemaError

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1
ARTIFACT_KINDS = {
    "FixedPointRecord", "CriticalSet", "SignCertificate", "HypothesisReport",
    "ConnectivityReport", "BasinStats", "Summary",
}


def canonical(value):
    """JSON-native copy: tuples become lists, complex numbers [re, im]."""
    if isinstance(value, dict):
        return {str(k): canonical(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [canonical(v) for v in value]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if not math.isfinite(value):
            raise ValueError(f"Non-finite number {value} cannot be stored in a bundle")
        return value
    if isinstance(value, (complex, np.complexfloating)):
        return [canonical(value.real), canonical(value.imag)]
    if isinstance(value, Enum):
        return value.value
    if value is None or isinstance(value, str):
        return value
    raise TypeError(f"Cannot store {type(value).__name__} in a bundle")


def bundle_timestamp():
    """UTC creation time; SOURCE_DATE_EPOCH pins it for reproducible builds."""
    epoch = os.environ.get("SOURCE_DATE_EPOCH")
    moment = datetime.fromtimestamp(int(epoch), tz=timezone.utc) if epoch else datetime.now(timezone.utc)
    return moment.strftime("%Y-%m-%dT%H:%M:%SZ")


@dataclass
class Artifact:
    name: str
    kind: str
    operation: str
    inputs: Dict[str, Any]
    payload: Dict[str, Any]

    def __post_init__(self):
        if self.kind not in ARTIFACT_KINDS:
            raise ValueError(f"Unknown artifact kind {self.kind!r}")
        self.inputs = canonical(self.inputs)
        self.payload = canonical(self.payload)

    def to_dict(self):
        return {
            "name": self.name,
            "kind": self.kind,
            "operation": self.operation,
            "inputs": self.inputs,
            "payload": self.payload,
        }


@dataclass
class ExperimentBundle:
    map_source: str = ""
    params: Dict[str, complex] = field(default_factory=dict)
    artifacts: List[Artifact] = field(default_factory=list)
    tool_version: str = __version__
    created_at: str = field(default_factory=bundle_timestamp)
    schema_version: int = SCHEMA_VERSION

    def add(self, name, kind, operation, inputs, payload):
        artifact = Artifact(name, kind, operation, inputs, payload)
        self.artifacts.append(artifact)
        return artifact

    def artifact(self, name):
        for artifact in self.artifacts:
            if artifact.name == name:
                return artifact
        raise KeyError(name)

    def to_dict(self):
        return {
            "schema_version": self.schema_version,
            "tool_version": self.tool_version,
            "created_at": self.created_at,
            "map": {
                "source": self.map_source,
                "params": {k: [v.real, v.imag] for k, v in sorted(self.params.items())},
            },
            "artifacts": [a.to_dict() for a in self.artifacts],
        }


def dumps(bundle):
    return json.dumps(bundle.to_dict(), sort_keys=True, indent=2, allow_nan=False,
                      ensure_ascii=False) + "\n"


def save_bundle(bundle, path):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dumps(bundle), encoding="utf-8")
    logger.info(f"Bundle saved to {path} ({len(bundle.artifacts)} artifacts)")
    return path


def _require(data, key, kind, where):
    if key not in data:
        raise BundleSchemaError(f"Missing '{key}' in {where}")
    if not isinstance(data[key], kind):
        raise BundleSchemaError(f"'{key}' in {where} has type {type(data[key]).__name__}")
    return data[key]


def _param_value(name, value):
    if (not isinstance(value, list) or len(value) != 2
            or not all(isinstance(v, (int, float)) for v in value)):
        raise BundleSchemaError(f"Parameter '{name}' must be [re, im]")
    return complex(value[0], value[1])


def parse_bundle(text):
    """Validate the whole document before building anything."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise BundleSchemaError(f"Bundle is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise BundleSchemaError("Bundle root must be an object")

    version = _require(data, "schema_version", int, "bundle")
    if version != SCHEMA_VERSION:
        raise BundleSchemaError(f"Schema version {version} is not supported (expected {SCHEMA_VERSION})")
    tool_version = _require(data, "tool_version", str, "bundle")
    created_at = _require(data, "created_at", str, "bundle")
    map_info = _require(data, "map", dict, "bundle")
    source = _require(map_info, "source", str, "map")
    raw_params = _require(map_info, "params", dict, "map")
    params = {name: _param_value(name, value) for name, value in raw_params.items()}

    raw_artifacts = _require(data, "artifacts", list, "bundle")
    artifacts = []
    for i, entry in enumerate(raw_artifacts):
        where = f"artifact #{i}"
        if not isinstance(entry, dict):
            raise BundleSchemaError(f"{where} must be an object")
        fields = {
            "name": _require(entry, "name", str, where),
            "kind": _require(entry, "kind", str, where),
            "operation": _require(entry, "operation", str, where),
            "inputs": _require(entry, "inputs", dict, where),
            "payload": _require(entry, "payload", dict, where),
        }
        if fields["kind"] not in ARTIFACT_KINDS:
            raise BundleSchemaError(f"{where} has unknown kind {fields['kind']!r}")
        artifacts.append(fields)

    return ExperimentBundle(
        map_source=source,
        params=params,
        artifacts=[Artifact(**fields) for fields in artifacts],
        tool_version=tool_version,
        created_at=created_at,
        schema_version=version,
    )


def load_bundle(path):
    try:
        text = Path(path).read_text(encoding="utf-8")
    except UnicodeDecodeError as exc:
        raise BundleSchemaError(f"Bundle {path} is not UTF-8 text") from exc
    return parse_bundle(text)
