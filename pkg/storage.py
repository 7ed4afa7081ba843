"""
Artifact persistence
Instance / plan / reduction JSON, CSV tables with a reproducibility header and meta sidecars
"""

import os
import sys
import json
import logging
from datetime import datetime
from typing import Any, Dict, List, Optional

import pandas as pd
import pytz
from pydantic import ValidationError

from config import settings
from errors import ArtifactError
from models import (
    GraphInstance, OcrsPlan, Reduction, RunConfig, TableRow, SCHEMA_VERSION
)

logger = logging.getLogger(__name__)

STDIO = "-"


def _now_iso() -> str:
    try:
        tz = pytz.timezone(settings.TIMEZONE)
    except pytz.UnknownTimeZoneError:
        logger.warning(f"⚠️ Unknown TIMEZONE {settings.TIMEZONE}, using UTC")
        tz = pytz.UTC
    return datetime.now(tz).isoformat()


def _ensure_parent(path: str) -> None:
    parent = os.path.dirname(os.path.abspath(path))
    os.makedirs(parent, exist_ok=True)


def read_json(path: str) -> Dict[str, Any]:
    """Read a JSON document from a path, or from stdin when path is '-'"""
    try:
        if path == STDIO:
            return json.load(sys.stdin)
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except FileNotFoundError:
        raise ArtifactError(f"File not found: {path}")
    except json.JSONDecodeError as e:
        raise ArtifactError(f"Invalid JSON in {path}: {e}")


def read_object(path: str, kind: str) -> Dict[str, Any]:
    """read_json for artifacts that must be a JSON object"""
    payload = read_json(path)
    if not isinstance(payload, dict):
        raise ArtifactError(f"{kind} {path} must be a JSON object")
    return payload


def write_json(payload: Any, path: str) -> None:
    """Write a JSON document to a path, or to stdout when path is '-'"""
    text = json.dumps(payload, indent=2, sort_keys=False)
    if path == STDIO:
        sys.stdout.write(text + "\n")
        sys.stdout.flush()
        return
    _ensure_parent(path)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text + "\n")
    logger.info(f"📁 Wrote {path}")


def write_meta(path: str, run_config: RunConfig) -> str:
    """
    Write the <stem>.meta.json sidecar of an artifact

    Args:
        path: Artifact path
        run_config: Configuration that produced it

    Returns:
        Sidecar path
    """
    stem, _ = os.path.splitext(path)
    meta_path = f"{stem}.meta.json"
    meta = {
        "schema_version": SCHEMA_VERSION,
        "artifact": os.path.basename(path),
        "created_at": _now_iso(),
        "seed": run_config.seed,
        "config_hash": run_config.config_hash(),
        "config": run_config.model_dump(mode="json"),
    }
    _ensure_parent(meta_path)
    with open(meta_path, "w", encoding="utf-8") as fh:
        json.dump(meta, fh, indent=2)
    return meta_path


# Instances
def load_instance(path: str) -> GraphInstance:
    """Parse an instance JSON file into a GraphInstance (structure is checked separately)"""
    payload = read_object(path, "Instance")

    version = payload.pop("schema_version", SCHEMA_VERSION)
    if isinstance(version, bool) or not isinstance(version, int):
        raise ArtifactError(f"Instance schema_version must be an integer, got {version!r}")
    if version > SCHEMA_VERSION:
        raise ArtifactError(f"Instance schema version {version} is newer than supported {SCHEMA_VERSION}")

    try:
        return GraphInstance.model_validate(payload)
    except ValidationError as e:
        raise ArtifactError(f"Malformed instance {path}: {e.errors()[0].get('msg', e)}")


def save_instance(g: GraphInstance, path: str) -> None:
    write_json(g.to_json_dict(), path)


# Plans and reductions
def load_plan(path: str) -> OcrsPlan:
    payload = read_object(path, "Plan")
    try:
        return OcrsPlan.model_validate(payload.get("plan", payload))
    except ValidationError as e:
        raise ArtifactError(f"Malformed plan {path}: {e.errors()[0].get('msg', e)}")


def save_plan(plan: OcrsPlan, path: str, run_config: Optional[RunConfig] = None) -> None:
    payload: Dict[str, Any] = {"schema_version": SCHEMA_VERSION, "plan": plan.model_dump(mode="json")}
    if run_config is not None:
        payload["seed"] = run_config.seed
        payload["config_hash"] = run_config.config_hash()
    write_json(payload, path)


def save_edge_map(reduction: Reduction, path: str) -> None:
    write_json({
        "schema_version": SCHEMA_VERSION,
        "method": reduction.method.value,
        "edge_map": reduction.edge_map,
        "added_vertices": reduction.added_vertices,
    }, path)


def load_edge_map(path: str) -> List[int]:
    payload = read_object(path, "Edge map")
    edge_map = payload.get("edge_map")
    if not isinstance(edge_map, list):
        raise ArtifactError(f"Edge map {path} has no edge_map list")
    try:
        return [int(i) for i in edge_map]
    except (TypeError, ValueError):
        raise ArtifactError(f"Edge map {path} holds non-integer entries")


# Tables
def write_csv(frame: pd.DataFrame, path: str, run_config: RunConfig) -> None:
    """
    Write a CSV preceded by a '# seed=..., config_hash=...' line

    Bodies never carry timestamps; the timestamp goes to the meta sidecar.
    """
    header = f"# seed={run_config.seed}, config_hash={run_config.config_hash()}\n"
    if path == STDIO:
        sys.stdout.write(header)
        frame.to_csv(sys.stdout, index=False, lineterminator="\n")
        sys.stdout.flush()
        return
    _ensure_parent(path)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(header)
        frame.to_csv(fh, index=False, lineterminator="\n")
    write_meta(path, run_config)
    logger.info(f"📁 Wrote {path} ({len(frame)} rows)")


def read_csv(path: str) -> pd.DataFrame:
    try:
        return pd.read_csv(path, comment="#")
    except FileNotFoundError:
        raise ArtifactError(f"File not found: {path}")


# Reproduction-table summaries
def save_summary(command: str, rows: List[TableRow], run_config: RunConfig,
                 output_dir: Optional[str] = None, extra: Optional[Dict[str, Any]] = None) -> str:
    """Write <command>.summary.json with the table rows a command contributes"""
    directory = output_dir or settings.OUTPUT_DIR
    os.makedirs(directory, exist_ok=True)
    path = os.path.join(directory, f"{command}.summary.json")
    payload = {
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "seed": run_config.seed,
        "config_hash": run_config.config_hash(),
        "created_at": _now_iso(),
        "rows": [r.model_dump(mode="json") for r in rows],
        "extra": extra or {},
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2)
    logger.info(f"📁 Wrote summary {path}")
    return path


def load_summaries(directory: str) -> List[Dict[str, Any]]:
    """Read every *.summary.json in a directory, sorted by file name"""
    if not os.path.isdir(directory):
        raise ArtifactError(f"Results directory not found: {directory}")
    summaries = []
    for name in sorted(os.listdir(directory)):
        if not name.endswith(".summary.json"):
            continue
        path = os.path.join(directory, name)
        try:
            summaries.append(read_object(path, "Summary"))
        except ArtifactError as e:
            logger.warning(f"⚠️ Skipping unreadable summary {name}: {e}")
    return summaries
