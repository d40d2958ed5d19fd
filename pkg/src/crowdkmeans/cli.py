"""Command-line entry point: ``crowdkmeans {gen,run,bench,rank}``.

Exit codes: 0 success, 1 usage error, 2 data error, 3 numeric error.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from pathlib import Path

from .bench import cluster_once, emit_report, friedman_ranks, load_grid, load_results, ranks_csv_rows, run_grid
from .datasets import CsvSchema, generate_blobs, load_blob_manifest, load_csv, save_csv
from .errors import DataError, NumericError
from .initializers import METHODS
from .lloyd import KmeansConfig
from .metrics import METRIC_NAMES

EXIT_USAGE, EXIT_DATA, EXIT_NUMERIC = 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _cmd_gen(args) -> int:
    out = Path(args.out)
    for spec in load_blob_manifest(args.manifest):
        path = out / f"{spec.name}.csv"
        save_csv(generate_blobs(spec), path)
        print(path)
    return 0


def _cmd_run(args) -> int:
    schema = CsvSchema(args.delimiter, not args.no_header, args.label_col)
    dataset = load_csv(args.data, schema)
    k = args.k if args.k is not None else dataset.n_truth_clusters
    if k is None:
        raise DataError("--k is required when the data have no label column")
    config = KmeansConfig(args.max_iter, args.tol, args.standardize)
    result, report = cluster_once(dataset, args.init, k, args.seed, config)
    doc = report.to_dict()
    doc.update({"init": args.init, "k": k, "iterations": result.iterations, "converged": result.converged})
    print(json.dumps(doc, indent=2))
    return 0


def _cmd_bench(args) -> int:
    grid, workers = load_grid(args.manifest)
    if args.workers is not None:
        workers = args.workers
    table = run_grid(grid, workers=workers)
    summaries = []
    for metric in grid.metrics:
        try:
            summaries.append(friedman_ranks(table, metric))
        except DataError as exc:
            logging.warning("no ranks for %s: %s", metric, exc)
    emit_report(table, summaries, args.out)
    for s in summaries:
        best = min(s.mean_ranks, key=s.mean_ranks.get)
        print(f"{s.metric}: best mean rank {best} ({s.mean_ranks[best]:.3f}), chi2={s.chi_square:.3f}")
    return 0


def _cmd_rank(args) -> int:
    table = load_results(args.results)
    summary = friedman_ranks(table, args.metric)
    csv.writer(sys.stdout, lineterminator="\n").writerows(ranks_csv_rows(summary))
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="crowdkmeans", description="Crowding-distance k-means seeding and benchmarks.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    g = sub.add_parser("gen", help="generate blob datasets from a manifest")
    g.add_argument("--manifest", required=True)
    g.add_argument("--out", required=True)
    g.set_defaults(func=_cmd_gen)

    r = sub.add_parser("run", help="cluster one CSV file and print its metrics as JSON")
    r.add_argument("--data", required=True)
    r.add_argument("--label-col", default=None)
    r.add_argument("--k", type=int, default=None)
    r.add_argument("--init", choices=METHODS, default="ckmeans")
    r.add_argument("--seed", type=int, default=0)
    r.add_argument("--standardize", action="store_true")
    r.add_argument("--tol", type=float, default=1e-6)
    r.add_argument("--max-iter", type=int, default=300)
    r.add_argument("--delimiter", default=",")
    r.add_argument("--no-header", action="store_true")
    r.set_defaults(func=_cmd_run)

    b = sub.add_parser("bench", help="run a TOML experiment grid")
    b.add_argument("--manifest", required=True)
    b.add_argument("--out", required=True)
    b.add_argument("--workers", type=int, default=None)
    b.set_defaults(func=_cmd_bench)

    k = sub.add_parser("rank", help="Friedman ranks from a results.json file (CSV on stdout)")
    k.add_argument("--results", required=True)
    k.add_argument("--metric", required=True, choices=METRIC_NAMES)
    k.set_defaults(func=_cmd_rank)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except (DataError, OSError, KeyError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (NumericError, ArithmeticError) as exc:
        print(f"numeric error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
