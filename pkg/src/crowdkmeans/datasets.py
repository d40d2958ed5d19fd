"""Dataset I/O and synthetic Gaussian blobs.

CSV files are UTF-8 with a configurable delimiter, an optional header row and
an optional ground-truth label column.  Labels are remapped to ``0..k-1`` in
order of first appearance.

A blob manifest has one dataset per line::

    name,n,d,k,std,seed

Blank lines, ``#`` comments and a header line starting with ``name`` are
ignored.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from .core import Dataset
from .errors import BadSpec, EmptyFile, ParseError, RaggedRows


@dataclass(frozen=True)
class BlobSpec:
    n_samples: int
    n_features: int
    n_clusters: int
    center_box: Tuple[float, float] = (-10.0, 10.0)
    cluster_std: float = 1.0
    balanced: bool = True
    rng_seed: int = 0
    name: str = "blobs"

    def validate(self) -> None:
        for field_name in ("n_samples", "n_features", "n_clusters"):
            value = getattr(self, field_name)
            if isinstance(value, bool) or not isinstance(value, (int, np.integer)) or value < 1:
                raise BadSpec(f"{field_name} must be a positive integer, got {value!r}")
        if self.n_clusters > self.n_samples:
            raise BadSpec("n_clusters cannot exceed n_samples")
        lo, hi = self.center_box
        if not (math.isfinite(lo) and math.isfinite(hi) and lo <= hi):
            raise BadSpec(f"bad center_box {self.center_box!r}")
        if not (math.isfinite(self.cluster_std) and self.cluster_std > 0):
            raise BadSpec("cluster_std must be a positive finite number")


@dataclass(frozen=True)
class CsvSchema:
    delimiter: str = ","
    has_header: bool = True
    # column name (requires a header) or 0-based column index
    label_column: Optional[Union[str, int]] = None


def first_appearance_codes(values: Sequence) -> np.ndarray:
    mapping: dict = {}
    return np.array([mapping.setdefault(v, len(mapping)) for v in values], dtype=np.int64)


def _cluster_sizes(spec: BlobSpec, rng: np.random.Generator) -> np.ndarray:
    n, k = spec.n_samples, spec.n_clusters
    if spec.balanced:
        sizes = np.full(k, n // k)
        sizes[: n % k] += 1
        return sizes
    weights = rng.dirichlet(np.ones(k))
    return 1 + rng.multinomial(n - k, weights)


def generate_blobs(spec: BlobSpec) -> Dataset:
    """Isotropic Gaussian clusters around centers drawn uniformly in ``center_box``.

    Rows are shuffled; truth labels are numbered in order of first appearance
    so that a CSV round trip reproduces them exactly.
    """
    spec.validate()
    rng = np.random.default_rng(spec.rng_seed)
    lo, hi = spec.center_box
    centers = rng.uniform(lo, hi, size=(spec.n_clusters, spec.n_features))
    labels = np.repeat(np.arange(spec.n_clusters), _cluster_sizes(spec, rng))
    points = centers[labels] + rng.normal(0.0, spec.cluster_std, size=(spec.n_samples, spec.n_features))
    perm = rng.permutation(spec.n_samples)
    return Dataset(points[perm], first_appearance_codes(labels[perm].tolist()), spec.name)


def _label_index(schema: CsvSchema, header: Optional[List[str]], ncols: int) -> Optional[int]:
    col = schema.label_column
    if col is None:
        return None
    if isinstance(col, str) and not col.lstrip("-").isdigit():
        if header is None:
            raise BadSpec("label column given by name but the file has no header")
        names = [h.strip() for h in header]
        if col not in names:
            raise BadSpec(f"label column {col!r} not in header {names}")
        return names.index(col)
    idx = int(col)
    if not 0 <= idx < ncols:
        raise BadSpec(f"label column index {idx} out of range for {ncols} columns")
    return idx


def load_csv(path, schema: CsvSchema = CsvSchema()) -> Dataset:
    """Read a dataset from CSV.

    Raises:
        EmptyFile: no data rows.
        RaggedRows: a row has a different number of cells than the first.
        ParseError: a feature cell is not a finite number (1-based row and
            column as they appear in the file).
    """
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as fh:
        rows = [(lineno, row) for lineno, row in enumerate(csv.reader(fh, delimiter=schema.delimiter), 1)
                if row and any(cell.strip() for cell in row)]
    header = None
    if schema.has_header and rows:
        header = rows.pop(0)[1]
    if not rows:
        raise EmptyFile(f"{path} has no data rows")
    ncols = len(header) if header is not None else len(rows[0][1])
    label_idx = _label_index(schema, header, ncols)

    features, raw_labels = [], []
    for lineno, row in rows:
        if len(row) != ncols:
            raise RaggedRows(f"{path}:{lineno} has {len(row)} cells, expected {ncols}")
        values = []
        for col, cell in enumerate(row):
            if col == label_idx:
                raw_labels.append(cell.strip())
                continue
            try:
                value = float(cell)
            except ValueError:
                raise ParseError(lineno, col + 1, cell) from None
            if not math.isfinite(value):
                raise ParseError(lineno, col + 1, cell)
            values.append(value)
        features.append(values)
    if not features[0]:
        raise BadSpec(f"{path} has no feature columns")
    truth = first_appearance_codes(raw_labels) if label_idx is not None else None
    return Dataset(np.array(features, dtype=np.float64), truth, path.stem)


def save_csv(dataset: Dataset, path, schema: CsvSchema = CsvSchema(label_column="label")) -> None:
    """Write a dataset with shortest round-trip float formatting.

    The label column is written only if the dataset has truth labels; a string
    ``label_column`` names it (default position: last), an integer places it.
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    d = dataset.d
    header = [f"x{j}" for j in range(d)]
    label_pos = None
    if dataset.truth_labels is not None:
        col = schema.label_column if schema.label_column is not None else "label"
        if isinstance(col, str):
            label_pos, label_name = d, col
        else:
            label_pos, label_name = min(int(col), d), "label"
        header.insert(label_pos, label_name)
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, delimiter=schema.delimiter, lineterminator="\n")
        if schema.has_header:
            writer.writerow(header)
        for i, row in enumerate(dataset.points):
            cells = [repr(float(v)) for v in row]
            if label_pos is not None:
                cells.insert(label_pos, str(int(dataset.truth_labels[i])))
            writer.writerow(cells)


def parse_blob_manifest(lines) -> List[BlobSpec]:
    specs = []
    for lineno, line in enumerate(lines, 1):
        line = line.strip()
        if not line or line.startswith("#") or line.lower().startswith("name"):
            continue
        parts = [p.strip() for p in line.split(",")]
        if len(parts) != 6:
            raise BadSpec(f"manifest line {lineno}: expected name,n,d,k,std,seed")
        name, n, d, k, std, seed = parts
        try:
            spec = BlobSpec(int(n), int(d), int(k), cluster_std=float(std), rng_seed=int(seed), name=name)
        except ValueError:
            raise BadSpec(f"manifest line {lineno}: non-numeric field in {line!r}") from None
        spec.validate()
        specs.append(spec)
    return specs


def load_blob_manifest(path) -> List[BlobSpec]:
    with open(path, encoding="utf-8") as fh:
        return parse_blob_manifest(fh)


def table1_blob_specs(seed_offset: int = 0) -> List[BlobSpec]:
    """The 20 artificial configurations (n, d, k) benchmarked in the reference study.

    ``seed_offset`` is added to every generator seed to produce a fresh suite
    of the same shapes.
    """
    text = resources.files("crowdkmeans").joinpath("data/table1_blobs.csv").read_text(encoding="utf-8")
    specs = parse_blob_manifest(text.splitlines())
    if seed_offset:
        specs = [
            BlobSpec(s.n_samples, s.n_features, s.n_clusters, s.center_box, s.cluster_std,
                     s.balanced, s.rng_seed + seed_offset, s.name)
            for s in specs
        ]
    return specs
