"""
Experiment Analytics

Parameter sweeps over k (RMS) and radius (Medoid-Shift), and the
reproduction report that compares computed results against the published
reference values for each prepared dataset.
"""

import io
import json
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

import config
from errors import CommunityDetectionError, UsageError
from medoid_shift import ShiftConfig, medoid_shift_clustering, radius_grid
from modules import console
from modules.data import Graph, GroundTruth, load_graph, load_ground_truth_file
from modules.metrics import modularity, nmi
from modules.similarity import distance_from_similarity, similarity_for
from rms import Clustering, assign_labels, check_clustering, medoid_clustering
from results import json_number, validate

OBJECTIVES = ("modularity", "nmi")
CSV_COLUMNS = ["param", "clusters", "modularity", "nmi", "wall_ms"]


@dataclass(frozen=True)
class SweepRow:
    """One evaluated parameter value"""

    param: float
    clusters: int
    modularity: float
    nmi: Optional[float]
    wall_ms: float
    clustering: Optional[Clustering] = field(default=None, compare=False, repr=False)

    def objective(self, name: str) -> float:
        return self.nmi if name == "nmi" else self.modularity


@dataclass(frozen=True)
class SweepResult:
    """Rows in parameter order plus the best one under the objective"""

    parameter: str
    objective: str
    rows: Tuple[SweepRow, ...]

    @property
    def best_row(self) -> SweepRow:
        # rows are sorted by parameter, so the first maximum is the smallest parameter
        best_value = max(row.objective(self.objective) for row in self.rows)
        return next(row for row in self.rows if row.objective(self.objective) == best_value)

    def to_frame(self, record_timings: Optional[bool] = None) -> pd.DataFrame:
        if record_timings is None:
            record_timings = config.RECORD_TIMINGS
        records = []
        for row in self.rows:
            records.append({
                "param": _format_param(row.param),
                "clusters": row.clusters,
                "modularity": f"{row.modularity:.6f}",
                "nmi": f"{row.nmi:.6f}" if row.nmi is not None else "",
                "wall_ms": f"{row.wall_ms:.3f}" if record_timings else "",
            })
        return pd.DataFrame(records, columns=CSV_COLUMNS)

    def to_csv(self, record_timings: Optional[bool] = None) -> str:
        """CSV with header param,clusters,modularity,nmi,wall_ms"""
        buffer = io.StringIO()
        self.to_frame(record_timings).to_csv(buffer, index=False, lineterminator="\n")
        return buffer.getvalue()

    def summary(self) -> str:
        best = self.best_row
        line = (f"best {self.parameter}={_format_param(best.param)}: "
                f"{best.clusters} clusters, modularity {best.modularity:.4f}")
        if best.nmi is not None:
            line += f", nmi {best.nmi:.4f}"
        return line


def _format_param(value: float) -> str:
    if isinstance(value, (int, np.integer)) or float(value).is_integer():
        return str(int(value))
    if math.isinf(value):
        return "inf"
    return repr(float(value))


def _check_objective(objective: str, truth: Optional[GroundTruth]):
    if objective not in OBJECTIVES:
        raise UsageError(f"unknown objective {objective!r} (use {', '.join(OBJECTIVES)})")
    if objective == "nmi" and truth is None:
        raise UsageError("the nmi objective needs a ground truth")


def _run_points(g: Graph, params: Sequence, cluster: Callable[[object], Clustering],
                truth: Optional[GroundTruth], threads: Optional[int]) -> List[SweepRow]:
    """Evaluate every parameter; output order follows params, not completion"""

    def evaluate(param) -> SweepRow:
        started = time.perf_counter()
        clustering = cluster(param)
        check_clustering(clustering)
        elapsed = (time.perf_counter() - started) * 1000.0
        return SweepRow(
            param=param,
            clusters=clustering.num_clusters,
            modularity=modularity(g, clustering.labels),
            nmi=nmi(truth.labels, clustering.labels) if truth is not None else None,
            wall_ms=elapsed,
            clustering=clustering,
        )

    workers = max(1, threads or config.THREADS)
    if workers == 1:
        return [evaluate(param) for param in params]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(evaluate, params))


def sweep_k(g: Graph, k_min: int, k_max: int, objective: str = "modularity",
            truth: Optional[GroundTruth] = None, threads: Optional[int] = None,
            tie_rule: Optional[str] = None) -> SweepResult:
    """
    Run RMS for every k in [k_min, k_max]

    Args:
        g: Graph to cluster
        k_min, k_max: Inclusive range; k_max is clamped to n - 1
        objective: "modularity" or "nmi" (nmi needs truth)
        truth: Optional ground truth
        threads: Worker cap

    Returns:
        SweepResult over k
    """
    _check_objective(objective, truth)
    if g.n == 0:
        raise UsageError("graph has no nodes")
    if k_min < 1 or k_max < k_min:
        raise UsageError(f"empty k range [{k_min}, {k_max}]")
    upper = min(k_max, max(1, g.n - 1))
    if upper < k_max:
        console.warn(f"k range clamped to [{k_min}, {upper}] for {g.n} nodes")
    if k_min > upper:
        raise UsageError(f"empty k range [{k_min}, {upper}] after clamping")

    s = similarity_for(g)

    def cluster(k):
        return assign_labels(medoid_clustering(s, k, tie_rule=tie_rule))

    rows = _run_points(g, list(range(k_min, upper + 1)), cluster, truth, threads)
    return SweepResult(parameter="k", objective=objective, rows=tuple(rows))


def sweep_radius(g: Graph, radii: Sequence[float], transform: Optional[str] = None,
                 objective: str = "modularity", truth: Optional[GroundTruth] = None,
                 kernel: Optional[str] = None, threads: Optional[int] = None) -> SweepResult:
    """Run the Medoid-Shift baseline for every radius (ascending)"""
    _check_objective(objective, truth)
    if g.n == 0:
        raise UsageError("graph has no nodes")
    if len(radii) == 0:
        raise UsageError("radius list is empty")
    if any(math.isnan(r) or r < 0 for r in radii):
        raise UsageError("radii must be non-negative")

    transform = transform or config.DEFAULT_TRANSFORM
    kernel = kernel or config.DEFAULT_KERNEL
    d = distance_from_similarity(similarity_for(g), transform)

    def cluster(radius):
        return medoid_shift_clustering(d, ShiftConfig(radius=radius, transform=transform,
                                                      kernel=kernel))

    rows = _run_points(g, sorted(set(float(r) for r in radii)), cluster, truth, threads)
    return SweepResult(parameter="radius", objective=objective, rows=tuple(rows))


# -----------------------
# Reproduction report
# -----------------------

def _within(value: Optional[float], target: Optional[float], tolerance: float) -> Optional[bool]:
    if value is None or target is None:
        return None
    return bool(abs(value - target) <= tolerance + 1e-12)


class ReproductionRunner:
    """Runs every dataset of a manifest and compares against reference values"""

    def __init__(self, dataset_dir: str, threads: Optional[int] = None,
                 k_max: int = config.SWEEP_K_MAX, radius_steps: int = config.RADIUS_STEPS):
        self.dataset_dir = dataset_dir
        self.threads = threads
        self.k_max = k_max
        self.radius_steps = radius_steps

    def load_manifest(self) -> Dict:
        path = os.path.join(self.dataset_dir, config.MANIFEST_FILE)
        if not os.path.exists(path):
            raise UsageError(f"no {config.MANIFEST_FILE} in {self.dataset_dir}")
        with open(path, "r", encoding="utf-8") as f:
            return json.load(f)

    def _path(self, relative: str) -> str:
        return relative if os.path.isabs(relative) else os.path.join(self.dataset_dir, relative)

    def _load(self, entry: Dict) -> Tuple[Graph, Optional[GroundTruth]]:
        graph = load_graph(self._path(entry["path"]), entry.get("format", "edgelist"),
                           directed=entry.get("directed", False),
                           weighted=entry.get("weighted", False))
        truth = None
        if entry.get("truth_path"):
            source = entry["truth_path"]
            truth = load_ground_truth_file(source if source.startswith("attr:") else self._path(source),
                                           graph)
        return graph, truth

    def _status(self, entry: Dict, metric: str, value: float, clusters: int) -> Dict:
        tolerance = config.NMI_TOLERANCE if metric == "nmi" else config.MODULARITY_TOLERANCE
        value_ok = _within(value, entry.get("reference_value"), tolerance)
        clusters_ok = _within(clusters, entry.get("reference_clusters"), config.CLUSTER_COUNT_TOLERANCE)
        gated = entry.get("gated", True) and entry.get("reference_value") is not None
        if not gated:
            status = "REPORTED"
        elif value_ok is not False and clusters_ok is not False:
            status = "PASS"
        else:
            status = "DEVIATION"
        return {"value_within_tolerance": value_ok, "clusters_within_tolerance": clusters_ok,
                "gated": bool(gated), "status": status}

    def run_dataset(self, name: str, entry: Dict) -> Dict:
        """Reference-k run, surrounding k sweep and radius sweep for one dataset"""
        graph, truth = self._load(entry)
        metric = entry.get("metric", "nmi" if truth is not None else "modularity")
        _check_objective(metric, truth)
        console.info(f"{name}: {graph.n} nodes, {graph.m} edges, metric {metric}")

        reference_k = entry.get("reference_k")
        k_top = max(self.k_max, reference_k or 1)
        k_sweep = sweep_k(graph, 1, k_top, metric, truth, threads=self.threads)

        at_reference = None
        if reference_k is not None:
            match = [row for row in k_sweep.rows if row.param == min(reference_k, max(1, graph.n - 1))]
            row = match[0]
            at_reference = {"k": reference_k, "value": row.objective(metric), "clusters": row.clusters}

        d = distance_from_similarity(similarity_for(graph), config.DEFAULT_TRANSFORM)
        radius_sweep = sweep_radius(graph, radius_grid(d, self.radius_steps), objective=metric,
                                    truth=truth, threads=self.threads)

        best = k_sweep.best_row
        baseline = radius_sweep.best_row
        result = {
            "dataset": name,
            "nodes": graph.n,
            "edges": graph.m,
            "metric": metric,
            "reference": {
                "k": reference_k,
                "value": entry.get("reference_value"),
                "clusters": entry.get("reference_clusters"),
                "baseline_value": entry.get("reference_baseline_value"),
                "baseline_clusters": entry.get("reference_baseline_clusters"),
            },
            "at_reference_k": at_reference,
            "best_sweep": {"k": int(best.param), "value": best.objective(metric),
                           "clusters": best.clusters},
            "best_k_near_reference": (abs(int(best.param) - reference_k) <= 2) if reference_k else None,
            "baseline_best": {"radius": json_number(float(baseline.param)),
                              "value": baseline.objective(metric),
                              "clusters": baseline.clusters,
                              "transform": config.DEFAULT_TRANSFORM,
                              "kernel": config.DEFAULT_KERNEL},
            "rms_beats_baseline": bool(best.objective(metric) > baseline.objective(metric)),
        }
        if at_reference is not None:
            result.update(self._status(entry, metric, at_reference["value"], at_reference["clusters"]))
        else:
            result.update({"gated": False, "status": "REPORTED",
                           "value_within_tolerance": None, "clusters_within_tolerance": None})
        return result

    def tie_rule_appendix(self, name: str, entry: Dict, row: Dict) -> Dict:
        """Re-run a deviating dataset at the reference k under the prefer-self tie rule"""
        graph, truth = self._load(entry)
        metric = row["metric"]
        k = row["reference"]["k"]
        sweep = sweep_k(graph, k, k, metric, truth, threads=1, tie_rule="prefer_self")
        alternate = sweep.rows[0]
        status = self._status(entry, metric, alternate.objective(metric), alternate.clusters)
        return {
            "dataset": name,
            "k": k,
            "lowest_index": {"value": row["at_reference_k"]["value"],
                             "clusters": row["at_reference_k"]["clusters"],
                             "value_within_tolerance": row["value_within_tolerance"],
                             "clusters_within_tolerance": row["clusters_within_tolerance"]},
            "prefer_self": {"value": alternate.objective(metric),
                            "clusters": alternate.clusters,
                            "value_within_tolerance": status["value_within_tolerance"],
                            "clusters_within_tolerance": status["clusters_within_tolerance"]},
        }

    def run(self) -> Dict:
        """
        Run every manifest entry

        Returns:
            Report document (schemas/report.schema.json)
        """
        console.banner("Reproducing reference tables")
        manifest = self.load_manifest()
        datasets, skipped = [], []

        for name in sorted(manifest):
            entry = manifest[name]
            path = self._path(entry.get("path", ""))
            if not entry.get("path") or not os.path.exists(path):
                console.warn(f"{name}: dataset file missing ({path}), skipped")
                skipped.append({"dataset": name, "reason": f"missing file {entry.get('path')}"})
                continue
            try:
                datasets.append(self.run_dataset(name, entry))
                console.ok(f"{name}: {datasets[-1]['status']}")
            except CommunityDetectionError as e:
                console.warn(f"{name}: {e}, skipped")
                skipped.append({"dataset": name, "reason": str(e)})

        report = {"config": config.effective_config(), "datasets": datasets, "skipped": skipped}

        deviating = [row for row in datasets if row["status"] == "DEVIATION"]
        if deviating:
            console.warn(f"{len(deviating)} dataset(s) outside tolerance; adding tie-rule appendix")
            report["tie_rule_appendix"] = [
                self.tie_rule_appendix(row["dataset"], manifest[row["dataset"]], row)
                for row in deviating
            ]

        validate(report, "report")
        return report


def reproduce_tables(dataset_dir: str, threads: Optional[int] = None) -> Dict:
    """Report document for every dataset listed in dataset_dir/manifest.json"""
    return ReproductionRunner(dataset_dir, threads=threads).run()


def _fmt(value, clusters=None) -> str:
    if value is None:
        return "-"
    text = f"{value:.4f}"
    return f"{text} ({clusters})" if clusters is not None else text


def render_report(report: Dict) -> str:
    """Human-readable twin of the report document"""
    lines = []
    if report["datasets"]:
        table = pd.DataFrame([
            {
                "dataset": row["dataset"],
                "metric": row["metric"],
                "k": row["reference"]["k"] if row["reference"]["k"] is not None else "-",
                "reference": _fmt(row["reference"]["value"], row["reference"]["clusters"]),
                "computed": _fmt(row["at_reference_k"]["value"], row["at_reference_k"]["clusters"])
                if row["at_reference_k"] else "-",
                "best sweep": f"k={row['best_sweep']['k']} "
                              + _fmt(row["best_sweep"]["value"], row["best_sweep"]["clusters"]),
                "medoid-shift": _fmt(row["reference"]["baseline_value"],
                                     row["reference"]["baseline_clusters"]),
                "baseline best": _fmt(row["baseline_best"]["value"],
                                      row["baseline_best"]["clusters"]),
                "status": row["status"],
            }
            for row in report["datasets"]
        ])
        lines.append(table.to_string(index=False))
    else:
        lines.append("No datasets evaluated.")

    for entry in report["skipped"]:
        lines.append(f"skipped {entry['dataset']}: {entry['reason']}")

    if report.get("tie_rule_appendix"):
        lines.append("")
        lines.append("Tie-rule sensitivity (reference k)")
        appendix = pd.DataFrame([
            {
                "dataset": item["dataset"],
                "k": item["k"],
                "lowest_index": _fmt(item["lowest_index"]["value"],
                                     item["lowest_index"]["clusters"]),
                "prefer_self": _fmt(item["prefer_self"]["value"], item["prefer_self"]["clusters"]),
                "value ok (li/ps)": f"{item['lowest_index']['value_within_tolerance']}/"
                                    f"{item['prefer_self']['value_within_tolerance']}",
                "clusters ok (li/ps)": f"{item['lowest_index']['clusters_within_tolerance']}/"
                                       f"{item['prefer_self']['clusters_within_tolerance']}",
            }
            for item in report["tie_rule_appendix"]
        ])
        lines.append(appendix.to_string(index=False))
    return "\n".join(lines) + "\n"
