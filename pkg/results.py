"""
Result documents

Builds the JSON documents written by the toolkit (clusterings, metrics
reports, reproduction reports), validates them against the schemas shipped
in schemas/ and reads clustering files back.
"""

import json
import math
import os
import sys
from functools import lru_cache
from typing import Dict, List, Optional

import jsonschema

import config
from errors import GraphParseError, GroundTruthError, InvariantViolation
from modules.data import Graph
from modules.metrics import MetricsReport
from rms import Clustering

SCHEMAS = {
    "clustering": "clustering.schema.json",
    "metrics": "metrics.schema.json",
    "report": "report.schema.json",
}


def json_number(value: float):
    """Finite floats pass through, infinities become the string "inf" """
    if isinstance(value, float) and math.isinf(value):
        return "inf" if value > 0 else "-inf"
    return value


@lru_cache(maxsize=None)
def load_schema(name: str) -> Dict:
    path = os.path.join(config.SCHEMA_DIR, SCHEMAS[name])
    with open(path, "r", encoding="utf-8") as f:
        return json.load(f)


def validate(document: Dict, name: str):
    """Raise InvariantViolation when a document breaks its schema"""
    try:
        jsonschema.validate(instance=document, schema=load_schema(name))
    except jsonschema.ValidationError as e:
        raise InvariantViolation(f"{name} document violates its schema: {e.message}")


def clustering_document(g: Graph, clustering: Clustering,
                        metrics: Optional[MetricsReport] = None,
                        settings: Optional[Dict] = None) -> Dict:
    """
    Serialise a labelled clustering with node names

    Args:
        g: Graph the clustering was computed on
        clustering: Labelled clustering
        metrics: Optional metrics report to embed
        settings: Effective configuration to echo

    Returns:
        Dict matching schemas/clustering.schema.json
    """
    if clustering.labels is None:
        raise InvariantViolation("clustering has no labels; run assign_labels first")
    names = g.node_names
    document = {"algorithm": clustering.algorithm}
    if clustering.algorithm == "rms":
        document["k"] = clustering.params.get("k")
        document["tie_rule"] = clustering.params.get("tie_rule")
    else:
        document["radius"] = json_number(float(clustering.params.get("radius")))
        document["transform"] = clustering.params.get("transform")
        document["kernel"] = clustering.params.get("kernel")

    document.update({
        "num_clusters": clustering.num_clusters,
        "centers": [names[c] for c in clustering.centers],
        "labels": {names[i]: names[label] for i, label in enumerate(clustering.labels)},
        "iterations": clustering.iterations,
    })
    if metrics is not None:
        document["metrics"] = metrics.to_dict()
    if settings is not None:
        document["config"] = settings
    validate(document, "clustering")
    return document


def metrics_document(metrics: MetricsReport, settings: Optional[Dict] = None) -> Dict:
    document = metrics.to_dict()
    if settings is not None:
        document["config"] = settings
    validate(document, "metrics")
    return document


def dumps(document: Dict) -> str:
    return json.dumps(document, indent=2, ensure_ascii=False) + "\n"


def write_text(text: str, path: Optional[str] = None):
    """Write to a file, or to stdout when no path is given"""
    if path is None:
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(text)


def read_clustering_labels(path: str, g: Graph) -> List[str]:
    """
    Per-node labels from a clustering JSON file

    Returns:
        Center name per dense node id
    """
    if not os.path.exists(path):
        raise GraphParseError(f"file not found: {path}")
    try:
        with open(path, "r", encoding="utf-8") as f:
            document = json.load(f)
    except json.JSONDecodeError as e:
        raise GraphParseError(f"{path} is not valid JSON: {e.msg}", e.lineno)
    except UnicodeDecodeError as e:
        raise GraphParseError(f"{path} is not valid UTF-8 (byte {e.start})")

    labels = document.get("labels") if isinstance(document, dict) else None
    if not isinstance(labels, dict):
        raise GroundTruthError(f"{path} has no 'labels' mapping")

    unknown = [name for name in labels if name not in g.index]
    if unknown:
        raise GroundTruthError("label file references unknown node(s)", unknown)
    missing = [name for name in g.node_names if name not in labels]
    if missing:
        raise GroundTruthError("label file has no label for node(s)", missing)
    return [str(labels[name]) for name in g.node_names]
