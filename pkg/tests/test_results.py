import json
import math

import pytest

from errors import GraphParseError, GroundTruthError, InvariantViolation
from medoid_shift import ShiftConfig, run_medoid_shift
from modules.metrics import evaluate
from results import (clustering_document, json_number, metrics_document, read_clustering_labels,
                     validate, write_text)
from rms import Clustering, run_rms


def test_rms_document_uses_node_names(path3):
    c = run_rms(path3, 1)
    document = clustering_document(path3, c, evaluate(path3, c.labels))
    assert document["algorithm"] == "rms"
    assert document["k"] == 1
    assert document["centers"] == ["a", "b"]
    assert document["labels"] == {"a": "a", "b": "b", "c": "a"}
    assert document["iterations"] == c.iterations
    assert document["metrics"]["num_clusters"] == 2


def test_medoid_shift_document_records_radius(two_triangles):
    c = run_medoid_shift(two_triangles, ShiftConfig(radius=math.inf, kernel="flat"))
    document = clustering_document(two_triangles, c, settings={"radius": "inf"})
    assert document["radius"] == "inf"
    assert document["transform"] == "reciprocal"
    assert document["kernel"] == "flat"
    assert document["config"] == {"radius": "inf"}
    json.dumps(document, allow_nan=False)


def test_unlabelled_clustering_is_rejected(triangle):
    with pytest.raises(InvariantViolation):
        clustering_document(triangle, Clustering(next_medoid=(0, 0, 0), centers=(0,), iterations=1))


def test_schema_violations_raise(two_triangles):
    with pytest.raises(InvariantViolation):
        validate({"algorithm": "rms", "num_clusters": 1, "centers": [], "labels": {},
                  "iterations": 1}, "clustering")
    with pytest.raises(InvariantViolation):
        validate({"num_clusters": 2, "nmi": 1.5}, "metrics")


def test_json_number():
    assert json_number(math.inf) == "inf"
    assert json_number(2.5) == 2.5
    assert json_number(3) == 3


def test_metrics_document(two_triangles):
    document = metrics_document(evaluate(two_triangles, [0, 0, 0, 1, 1, 1], [0, 0, 0, 1, 1, 1]))
    assert document["modularity"] == pytest.approx(0.5)
    assert document["nmi"] == pytest.approx(1.0)


def test_labels_round_trip(tmp_path, two_triangles):
    c = run_rms(two_triangles, 2)
    path = tmp_path / "clustering.json"
    write_text(json.dumps(clustering_document(two_triangles, c)), str(path))
    assert read_clustering_labels(str(path), two_triangles) == ["0", "0", "0", "3", "3", "3"]


def test_label_file_errors(tmp_path, two_triangles):
    with pytest.raises(GraphParseError):
        read_clustering_labels(str(tmp_path / "absent.json"), two_triangles)

    broken = tmp_path / "broken.json"
    broken.write_text("{ nope", encoding="utf-8")
    with pytest.raises(GraphParseError):
        read_clustering_labels(str(broken), two_triangles)

    unknown = tmp_path / "unknown.json"
    labels = {str(i): "0" for i in range(6)}
    labels["ghost"] = "0"
    unknown.write_text(json.dumps({"labels": labels}), encoding="utf-8")
    with pytest.raises(GroundTruthError, match="ghost") as info:
        read_clustering_labels(str(unknown), two_triangles)
    assert info.value.exit_code == 2

    partial = tmp_path / "partial.json"
    partial.write_text(json.dumps({"labels": {"0": "0"}}), encoding="utf-8")
    with pytest.raises(GroundTruthError, match="no label"):
        read_clustering_labels(str(partial), two_triangles)


def test_non_utf8_label_file(tmp_path, two_triangles):
    bad = tmp_path / "labels.json"
    bad.write_bytes(b'{"labels": {"\xff": "0"}}')
    with pytest.raises(GraphParseError, match="UTF-8"):
        read_clustering_labels(str(bad), two_triangles)
