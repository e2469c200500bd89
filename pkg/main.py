"""
Community detection command line

    python3 main.py detect  --input G --format gml --algo rms --k 5 [--truth T]
    python3 main.py sweep   --input G --algo rms --k-min 1 --k-max 20 [--objective nmi --truth T]
    python3 main.py metrics --input G --labels clustering.json [--truth T]
    python3 main.py convert --input G --format gml --to edgelist
    python3 main.py reproduce --datasets datasets

Data goes to stdout (or --output), diagnostics to stderr.
Exit codes: 0 success, 1 usage error, 2 data/parse error, 3 invariant or
non-convergence error.
"""

import argparse
import math
import sys
from typing import List, Optional

import config
from analytics import render_report, reproduce_tables, sweep_k, sweep_radius
from errors import CommunityDetectionError, UsageError
from medoid_shift import KERNELS, ShiftConfig, radius_grid, run_medoid_shift
from modules import console
from modules.data import load_graph, load_ground_truth_file
from modules.metrics import evaluate
from modules.similarity import distance_from_similarity, similarity_for, similarity_to_csv
from results import (clustering_document, dumps, metrics_document, read_clustering_labels,
                     write_text)
from rms import TIE_RULES, run_rms

TRANSFORM_FLAGS = {"reciprocal": "reciprocal", "maxminus": "max_minus", "max_minus": "max_minus"}


class ArgumentParser(argparse.ArgumentParser):
    """argparse that reports usage problems as UsageError (exit code 1)"""

    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def _radius(text: str) -> float:
    value = float(text)
    if math.isnan(value) or value < 0:
        raise argparse.ArgumentTypeError(f"radius must be non-negative, got {text}")
    return value


def _radii(text: str):
    if text.strip().lower() == "auto":
        return "auto"
    try:
        return [_radius(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid radius list {text!r}")


def _add_graph_flags(parser: argparse.ArgumentParser):
    parser.add_argument("--input", help="graph file")
    parser.add_argument("--format", choices=["edgelist", "gml"], default="edgelist")
    parser.add_argument("--directed", action="store_true", help="fold directed arcs")
    parser.add_argument("--weighted", action="store_true",
                        help="use edge weights as similarities (otherwise common neighbours)")


def _add_algorithm_flags(parser: argparse.ArgumentParser):
    parser.add_argument("--algo", choices=["rms", "medoidshift"], default="rms")
    parser.add_argument("--transform", choices=sorted(TRANSFORM_FLAGS),
                        default=config.DEFAULT_TRANSFORM.replace("_", ""))
    parser.add_argument("--kernel", choices=KERNELS, default=config.DEFAULT_KERNEL)
    parser.add_argument("--tie-rule", choices=TIE_RULES, default=config.DEFAULT_TIE_RULE)
    parser.add_argument("--truth", help="ground truth file, or attr:NAME for a GML node attribute")
    parser.add_argument("--output", help="write here instead of stdout")
    parser.add_argument("--threads", type=int, default=config.THREADS)


def build_parser() -> argparse.ArgumentParser:
    parser = ArgumentParser(prog="main.py", description="Revised Medoid-Shift community detection")
    sub = parser.add_subparsers(dest="command", parser_class=ArgumentParser)

    detect = sub.add_parser("detect", help="cluster a graph")
    _add_graph_flags(detect)
    _add_algorithm_flags(detect)
    detect.add_argument("--k", type=int)
    detect.add_argument("--radius", type=_radius)
    detect.add_argument("--max-iterations", type=int)
    detect.add_argument("--similarity-csv", help="also dump the similarity matrix as CSV here")

    sweep = sub.add_parser("sweep", help="sweep k or radius and emit CSV")
    _add_graph_flags(sweep)
    _add_algorithm_flags(sweep)
    sweep.add_argument("--k-min", type=int)
    sweep.add_argument("--k-max", type=int)
    sweep.add_argument("--radii", type=_radii, help="comma separated radii, or 'auto'")
    sweep.add_argument("--objective", choices=["modularity", "nmi"], default="modularity")
    sweep.add_argument("--timings", action="store_true", help="fill the wall_ms column")

    metrics = sub.add_parser("metrics", help="score an existing clustering")
    _add_graph_flags(metrics)
    metrics.add_argument("--labels", help="clustering JSON written by detect")
    metrics.add_argument("--truth")
    metrics.add_argument("--output")

    convert = sub.add_parser("convert", help="write a canonical undirected edge list")
    _add_graph_flags(convert)
    convert.add_argument("--to", choices=["edgelist"], default="edgelist")
    convert.add_argument("--output")

    reproduce = sub.add_parser("reproduce", help="compare against the reference tables")
    reproduce.add_argument("--datasets", default=config.DATASET_DIR)
    reproduce.add_argument("--output", help="text report path")
    reproduce.add_argument("--json", help="JSON report path")
    reproduce.add_argument("--threads", type=int, default=config.THREADS)

    return parser


def _effective(args: argparse.Namespace) -> dict:
    settings = config.effective_config()
    settings.update({key: value for key, value in vars(args).items()
                     if value is not None and not callable(value)})
    if "radius" in settings:
        settings["radius"] = "inf" if math.isinf(settings["radius"]) else settings["radius"]
    if isinstance(settings.get("radii"), list):
        settings["radii"] = ["inf" if math.isinf(r) else r for r in settings["radii"]]
    return settings


def _load(args):
    if not args.input:
        raise UsageError("--input is required")
    graph = load_graph(args.input, args.format, directed=args.directed, weighted=args.weighted)
    console.ok(f"Loaded {args.input}: {graph.n} nodes, {graph.m} edges"
               f"{' (weighted)' if graph.is_weighted else ''}")
    truth = load_ground_truth_file(args.truth, graph) if getattr(args, "truth", None) else None
    return graph, truth


def cmd_detect(args) -> int:
    """Cluster a graph and write the clustering JSON"""
    graph, truth = _load(args)
    if args.similarity_csv:
        write_text(similarity_to_csv(similarity_for(graph)), args.similarity_csv)
    if args.algo == "rms":
        if args.k is None:
            raise UsageError("--algo rms needs --k")
        clustering = run_rms(graph, args.k, max_iterations=args.max_iterations,
                             tie_rule=args.tie_rule)
    else:
        if args.radius is None:
            raise UsageError("--algo medoidshift needs --radius")
        cfg = ShiftConfig(radius=args.radius, transform=TRANSFORM_FLAGS[args.transform],
                          kernel=args.kernel)
        clustering = run_medoid_shift(graph, cfg, max_iterations=args.max_iterations)

    report = evaluate(graph, clustering.labels, truth.labels if truth else None)
    document = clustering_document(graph, clustering, report, settings=_effective(args))
    write_text(dumps(document), args.output)
    console.ok(f"{clustering.num_clusters} clusters after {clustering.iterations} iteration(s), "
               f"modularity {report.modularity:.4f}"
               + (f", nmi {report.nmi:.4f}" if report.nmi is not None else ""))
    return 0


def cmd_sweep(args) -> int:
    """Sweep k (rms) or radius (medoidshift) and write the CSV"""
    if args.objective == "nmi" and not args.truth:
        raise UsageError("--objective nmi needs --truth")
    if args.algo == "rms" and (args.k_min is None or args.k_max is None):
        raise UsageError("--algo rms needs --k-min and --k-max")
    if args.algo == "medoidshift" and not args.radii:
        raise UsageError("--algo medoidshift needs --radii")

    graph, truth = _load(args)
    console.info(f"Effective configuration: {_effective(args)}")
    if args.algo == "rms":
        result = sweep_k(graph, args.k_min, args.k_max, args.objective, truth,
                         threads=args.threads, tie_rule=args.tie_rule)
    else:
        transform = TRANSFORM_FLAGS[args.transform]
        radii = args.radii
        if radii == "auto":
            radii = radius_grid(distance_from_similarity(similarity_for(graph), transform))
        result = sweep_radius(graph, radii, transform, args.objective, truth,
                              kernel=args.kernel, threads=args.threads)

    write_text(result.to_csv(record_timings=args.timings or config.RECORD_TIMINGS), args.output)
    console.ok(result.summary())
    return 0


def cmd_metrics(args) -> int:
    """Recompute modularity (and NMI) for an existing clustering file"""
    if not args.labels:
        raise UsageError("--labels is required")
    graph, truth = _load(args)
    labels = read_clustering_labels(args.labels, graph)
    report = evaluate(graph, labels, truth.labels if truth else None)
    write_text(dumps(metrics_document(report, settings=_effective(args))), args.output)
    return 0


def cmd_convert(args) -> int:
    """Write the canonical undirected edge list, weights always kept and summed"""
    args.weighted = True
    graph, _ = _load(args)
    write_text(graph.to_edge_list(), args.output)
    return 0


def cmd_reproduce(args) -> int:
    """Run every dataset of the manifest and write the text + JSON report"""
    report = reproduce_tables(args.datasets, threads=args.threads)
    write_text(render_report(report), args.output)
    if args.json:
        write_text(dumps(report), args.json)
    return 0


COMMANDS = {
    "detect": cmd_detect,
    "sweep": cmd_sweep,
    "metrics": cmd_metrics,
    "convert": cmd_convert,
    "reproduce": cmd_reproduce,
}


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            parser.print_help(sys.stderr)
            return 1
        return COMMANDS[args.command](args)
    except CommunityDetectionError as e:
        console.fail(str(e))
        return e.exit_code
    except OSError as e:
        console.fail(str(e))
        return 2
    except KeyboardInterrupt:
        console.fail("Interrupted")
        return 130


if __name__ == "__main__":
    sys.exit(main())
