"""Benchmark grid: methods x datasets x restarts, Friedman ranking, reports.

Every run draws from its own RNG stream, seeded with
``blake2b-64("{master_seed}|{dataset}|{method}|{restart}")``, so a cell's
result does not depend on execution order or on the number of workers.
Deterministic initializers (ckmeans, fckmeans) run once per dataset however
many restarts are requested.
"""

from __future__ import annotations

import csv
import hashlib
import json
import logging
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.stats import chi2, rankdata

from .core import Dataset, standardize
from .datasets import BlobSpec, CsvSchema, generate_blobs, load_blob_manifest, load_csv, table1_blob_specs
from .errors import BadSpec, ClusteringError, DataError, MissingCell
from .initializers import DETERMINISTIC, METHODS, initialize
from .lloyd import KmeansConfig, KmeansResult, run_kmeans
from .metrics import METRIC_NAMES, MetricReport, direction, evaluate

log = logging.getLogger(__name__)

SEED_DERIVATION = "blake2b-64(utf8('{master_seed}|{dataset}|{method}|{restart}')), little-endian"
RESULTS_FORMAT = 1


def cell_seed(master_seed: int, dataset: str, method: str, restart: int) -> int:
    key = f"{master_seed}|{dataset}|{method}|{restart}".encode("utf-8")
    return int.from_bytes(hashlib.blake2b(key, digest_size=8).digest(), "little")


@dataclass(frozen=True)
class DatasetRef:
    """A named dataset to load lazily: either a CSV file or a blob spec."""

    name: str
    path: Optional[str] = None
    schema: CsvSchema = CsvSchema()
    blob: Optional[BlobSpec] = None
    k: Optional[int] = None

    def load(self) -> Tuple[Dataset, int]:
        if self.blob is not None:
            ds = generate_blobs(self.blob)
            k = self.k or self.blob.n_clusters
        elif self.path is not None:
            ds = load_csv(self.path, self.schema)
            k = self.k or ds.n_truth_clusters
        else:
            raise BadSpec(f"dataset {self.name!r} has neither a path nor a blob spec")
        if not k:
            raise BadSpec(f"dataset {self.name!r}: k not given and no truth labels to infer it")
        return Dataset(ds.points, ds.truth_labels, self.name), int(k)

    @classmethod
    def from_blob(cls, spec: BlobSpec) -> "DatasetRef":
        return cls(spec.name, blob=spec)


@dataclass(frozen=True)
class ExperimentGrid:
    datasets: Sequence[DatasetRef]
    methods: Sequence[str] = METHODS
    restarts: int = 25
    kmeans_config: KmeansConfig = KmeansConfig()
    master_seed: int = 0
    metrics: Sequence[str] = METRIC_NAMES

    def __post_init__(self):
        if self.restarts < 1:
            raise BadSpec("restarts must be >= 1")
        if not self.methods:
            raise BadSpec("at least one method is required")
        unknown = set(self.methods) - set(METHODS)
        if unknown:
            raise BadSpec(f"unknown methods: {sorted(unknown)}")
        unknown = set(self.metrics) - set(METRIC_NAMES)
        if unknown:
            raise BadSpec(f"unknown metrics: {sorted(unknown)}")
        names = [d.name for d in self.datasets]
        if len(set(names)) != len(names):
            raise BadSpec("dataset names must be unique")

    def runs_for(self, method: str) -> int:
        return 1 if method in DETERMINISTIC else self.restarts


@dataclass
class RunRecord:
    restart: int
    seed: Optional[int]
    metrics: Dict[str, float]
    errors: Dict[str, str]
    iterations: int
    converged: bool
    wall_time: float = field(default=0.0, compare=False)

    def to_json(self) -> dict:
        return {
            "restart": self.restart,
            "seed": self.seed,
            "metrics": self.metrics,
            "errors": self.errors,
            "iterations": self.iterations,
            "converged": self.converged,
        }


@dataclass
class CellResult:
    dataset: str
    method: str
    k: int
    runs: List[RunRecord]
    means: Dict[str, float]
    # metric -> error name; a metric failing in any restart is failed for the cell
    failures: Dict[str, str]
    mean_iterations: Optional[float]
    error: Optional[str] = None
    wall_time: float = field(default=0.0, compare=False)

    def to_json(self) -> dict:
        return {
            "dataset": self.dataset,
            "method": self.method,
            "k": self.k,
            "error": self.error,
            "means": self.means,
            "failures": self.failures,
            "mean_iterations": self.mean_iterations,
            "runs": [r.to_json() for r in self.runs],
        }


@dataclass
class ResultTable:
    datasets: List[str]
    methods: List[str]
    metrics: List[str]
    cells: Dict[Tuple[str, str], CellResult]
    meta: dict = field(default_factory=dict)

    @property
    def rows(self) -> List[CellResult]:
        return [self.cells[(d, m)] for d in self.datasets for m in self.methods]

    def value(self, dataset: str, method: str, metric: str) -> Optional[float]:
        cell = self.cells.get((dataset, method))
        if cell is None:
            return None
        return cell.means.get(metric)


@dataclass(frozen=True)
class RankSummary:
    metric: str
    mean_ranks: Dict[str, float]
    chi_square: float
    p_value: float
    n_datasets: int
    direction: str


def cluster_once(
    dataset: Dataset, method: str, k: int, rng_seed=None, config: KmeansConfig = KmeansConfig(),
    metrics: Sequence[str] = METRIC_NAMES,
) -> Tuple[KmeansResult, MetricReport]:
    """Seed, run Lloyd and score a single clustering."""
    if config.standardize_first:
        dataset = standardize(dataset)
        config = replace(config, standardize_first=False)
    seeds = initialize(method, dataset, k, rng_seed)
    result = run_kmeans(dataset, seeds, config)
    report = evaluate(dataset, result.labels, result.centroids, dataset.truth_labels, metrics)
    return result, report


def run_cell(dataset: Dataset, k: int, method: str, grid: ExperimentGrid) -> CellResult:
    start = time.perf_counter()
    runs: List[RunRecord] = []
    try:
        for restart in range(grid.runs_for(method)):
            seed = None if method in DETERMINISTIC else cell_seed(grid.master_seed, dataset.name, method, restart)
            t0 = time.perf_counter()
            result, report = cluster_once(dataset, method, k, seed, grid.kmeans_config, grid.metrics)
            values = {m: v for m, v in report.values().items() if v is not None}
            runs.append(RunRecord(restart, seed, values, dict(report.errors or {}),
                                  result.iterations, result.converged, time.perf_counter() - t0))
    except ClusteringError as exc:
        log.warning("cell %s/%s failed: %s", dataset.name, method, exc)
        return CellResult(dataset.name, method, k, runs, {}, {}, None, type(exc).__name__,
                          time.perf_counter() - start)
    return _aggregate(dataset.name, method, k, runs, grid.metrics, time.perf_counter() - start)


def _aggregate(name, method, k, runs: List[RunRecord], metrics, wall_time=0.0) -> CellResult:
    means: Dict[str, float] = {}
    failures: Dict[str, str] = {}
    for metric in metrics:
        errs = [r.errors[metric] for r in runs if metric in r.errors]
        if errs:
            failures[metric] = errs[0]
            continue
        vals = [r.metrics[metric] for r in runs if metric in r.metrics]
        if vals:
            means[metric] = float(np.mean(vals))
    iters = float(np.mean([r.iterations for r in runs])) if runs else None
    return CellResult(name, method, k, runs, means, failures, iters, None, wall_time)


def _run_dataset_task(args) -> List[CellResult]:
    ref, methods, grid = args
    try:
        dataset, k = ref.load()
    except (ClusteringError, OSError) as exc:
        err = type(exc).__name__
        return [CellResult(ref.name, m, ref.k or 0, [], {}, {}, None, err) for m in methods]
    return [run_cell(dataset, k, m, grid) for m in methods]


def run_grid(grid: ExperimentGrid, workers: int = 1) -> ResultTable:
    """Run every (dataset, method) cell; failures are recorded, never raised.

    Args:
        workers: number of worker processes; 1 runs in-process. Results are
            identical for any value.
    """
    tasks = [(ref, (m,), grid) for ref in grid.datasets for m in grid.methods]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            batches = list(pool.map(_run_dataset_task, tasks))
    else:
        batches = [_run_dataset_task(t) for t in tasks]
    cells = {(c.dataset, c.method): c for batch in batches for c in batch}
    meta = {
        "format": RESULTS_FORMAT,
        "master_seed": grid.master_seed,
        "restarts": grid.restarts,
        "seed_derivation": SEED_DERIVATION,
        "kmeans": {
            "max_iter": grid.kmeans_config.max_iter,
            "tol": grid.kmeans_config.tol,
            "standardize": grid.kmeans_config.standardize_first,
        },
        "mi_units": "nats",
    }
    return ResultTable([d.name for d in grid.datasets], list(grid.methods), list(grid.metrics), cells, meta)


def friedman_ranks(table: ResultTable, metric: str) -> RankSummary:
    """Mean Friedman ranks (1 = best, ties averaged) and the chi-square statistic.

    Raises:
        MissingCell: some method lacks a value for some dataset.
        DataError: fewer than 2 methods or 2 datasets.
    """
    methods, datasets = table.methods, table.datasets
    m, n = len(methods), len(datasets)
    if m < 2 or n < 2:
        raise DataError(f"Friedman ranking needs >= 2 methods and >= 2 datasets (got {m}, {n})")
    values = np.empty((n, m))
    for i, ds in enumerate(datasets):
        for j, method in enumerate(methods):
            v = table.value(ds, method, metric)
            if v is None or math.isnan(v):
                raise MissingCell(f"no {metric} value for dataset {ds!r}, method {method!r}")
            values[i, j] = v
    sense = direction(metric)
    keyed = values if sense == "lower-better" else -values
    ranks = np.vstack([rankdata(row, method="average") for row in keyed])
    mean_ranks = ranks.mean(axis=0)
    stat = 12.0 * n / (m * (m + 1)) * (float(np.sum(mean_ranks**2)) - m * (m + 1) ** 2 / 4.0)
    stat = max(stat, 0.0)
    return RankSummary(
        metric,
        {method: float(r) for method, r in zip(methods, mean_ranks)},
        float(stat),
        float(chi2.sf(stat, m - 1)),
        n,
        sense,
    )


def results_json(table: ResultTable) -> str:
    doc = dict(table.meta)
    doc.update({
        "datasets": table.datasets,
        "methods": table.methods,
        "metrics": table.metrics,
        "cells": [c.to_json() for c in table.rows],
    })
    return json.dumps(doc, indent=1, sort_keys=True)


def load_results(path) -> ResultTable:
    doc = json.loads(Path(path).read_text(encoding="utf-8"))
    cells = {}
    for c in doc["cells"]:
        runs = [RunRecord(r["restart"], r["seed"], r["metrics"], r["errors"], r["iterations"], r["converged"])
                for r in c["runs"]]
        cells[(c["dataset"], c["method"])] = CellResult(
            c["dataset"], c["method"], c["k"], runs, c["means"], c["failures"], c["mean_iterations"], c["error"]
        )
    meta = {k: v for k, v in doc.items() if k not in ("datasets", "methods", "metrics", "cells")}
    return ResultTable(doc["datasets"], doc["methods"], doc["metrics"], cells, meta)


def _display(metric: str, value: float) -> float:
    # tables report the Rand index as a percentage
    return value * 100.0 if metric == "RI" else value


def best_methods(table: ResultTable, dataset: str, metric: str) -> List[str]:
    """Methods attaining the best value after rounding to 3 decimals."""
    scored = {}
    for method in table.methods:
        v = table.value(dataset, method, metric)
        if v is not None and not math.isnan(v):
            scored[method] = round(_display(metric, v), 3)
    if not scored:
        return []
    pick = min if direction(metric) == "lower-better" else max
    target = pick(scored.values())
    return [m for m in table.methods if scored.get(m) == target]


def _write_metric_table(table: ResultTable, metric: str, path: Path) -> None:
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["dataset", *table.methods, "best"])
        for ds in table.datasets:
            row = [ds]
            for method in table.methods:
                cell = table.cells[(ds, method)]
                v = cell.means.get(metric)
                if v is not None:
                    row.append(f"{_display(metric, v):.3f}")
                else:
                    row.append("failed:" + (cell.error or cell.failures.get(metric, "missing")))
            row.append(";".join(best_methods(table, ds, metric)))
            w.writerow(row)


def ranks_csv_rows(summary: RankSummary) -> List[list]:
    rows = [["metric", "method", "mean_rank", "chi_square", "p_value", "n_datasets", "direction"]]
    for method, r in summary.mean_ranks.items():
        rows.append([summary.metric, method, repr(r), repr(summary.chi_square), repr(summary.p_value),
                     summary.n_datasets, summary.direction])
    return rows


def emit_report(table: ResultTable, summaries: Sequence[RankSummary], out_dir) -> None:
    """Write ``results.json`` and ``timings.csv``, plus ``table_<M>.csv`` and
    ``ranks_<M>.csv`` for every metric that has a rank summary."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "results.json").write_text(results_json(table) + "\n", encoding="utf-8")
    with (out / "timings.csv").open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["dataset", "method", "runs", "wall_time_s"])
        for c in table.rows:
            w.writerow([c.dataset, c.method, len(c.runs), f"{c.wall_time:.6f}"])
    for s in summaries:
        _write_metric_table(table, s.metric, out / f"table_{s.metric}.csv")
        with (out / f"ranks_{s.metric}.csv").open("w", newline="", encoding="utf-8") as fh:
            csv.writer(fh, lineterminator="\n").writerows(ranks_csv_rows(s))


def _load_toml(path: Path) -> dict:
    try:
        import tomllib
    except ModuleNotFoundError:  # Python < 3.11
        import tomli as tomllib
    with path.open("rb") as fh:
        return tomllib.load(fh)


def load_grid(path) -> Tuple[ExperimentGrid, int]:
    """Parse a TOML grid manifest; returns the grid and the worker count.

    Relative paths are resolved against the manifest's directory.
    """
    path = Path(path)
    try:
        doc = _load_toml(path)
    except ValueError as exc:  # TOMLDecodeError subclasses ValueError
        raise BadSpec(f"{path}: {exc}") from None
    base = path.parent
    refs: List[DatasetRef] = []
    for entry in doc.get("datasets", []):
        try:
            name = entry.get("name") or Path(entry["path"]).stem
            schema = CsvSchema(entry.get("delimiter", ","), bool(entry.get("header", True)),
                               entry.get("label_column"))
            refs.append(DatasetRef(name, str(base / entry["path"]), schema, k=entry.get("k")))
        except KeyError as exc:
            raise BadSpec(f"dataset entry missing {exc}") from None
    if "blob_manifest" in doc:
        refs.extend(DatasetRef.from_blob(s) for s in load_blob_manifest(base / doc["blob_manifest"]))
    if doc.get("table1_blobs", False):
        refs.extend(DatasetRef.from_blob(s) for s in table1_blob_specs(int(doc.get("table1_seed_offset", 0))))
    if not refs:
        raise BadSpec(f"{path} lists no datasets")
    km = doc.get("kmeans", {})
    config = KmeansConfig(int(km.get("max_iter", 300)), float(km.get("tol", 1e-6)), bool(km.get("standardize", False)))
    grid = ExperimentGrid(
        refs,
        tuple(doc.get("methods", METHODS)),
        int(doc.get("restarts", 25)),
        config,
        int(doc.get("master_seed", 0)),
        tuple(doc.get("metrics", METRIC_NAMES)),
    )
    return grid, int(doc.get("workers", 1))
