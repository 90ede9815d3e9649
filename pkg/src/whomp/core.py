"""Domain types: datasets, partitions, and deterministic random streams."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np


class Rng:
    """Seeded random stream with stable, addressable child streams.

    Wraps a PCG64 generator keyed by (seed, key path).  The same seed and key
    path produce the same draw sequence on every run and platform, and child
    streams derived from distinct key paths are independent.
    """

    def __init__(self, seed: int = 0, _key: tuple[int, ...] = ()):
        self.seed = int(seed)
        self.key = tuple(int(k) for k in _key)
        seq = np.random.SeedSequence(entropy=self.seed, spawn_key=self.key)
        self.generator = np.random.Generator(np.random.PCG64(seq))

    def child(self, *indices: int) -> "Rng":
        """Derived stream addressed by (seed, *existing key, *indices)."""
        return Rng(self.seed, self.key + tuple(indices))

    # Thin delegation for the handful of draw methods used in the package.
    def integers(self, *args, **kwargs):
        return self.generator.integers(*args, **kwargs)

    def random(self, *args, **kwargs):
        return self.generator.random(*args, **kwargs)

    def normal(self, *args, **kwargs):
        return self.generator.normal(*args, **kwargs)

    def permutation(self, x):
        return self.generator.permutation(x)

    def choice(self, *args, **kwargs):
        return self.generator.choice(*args, **kwargs)

    def shuffle(self, x):
        self.generator.shuffle(x)


def as_rng(rng) -> Rng:
    """Coerce an int seed or Rng into an Rng."""
    if isinstance(rng, Rng):
        return rng
    if isinstance(rng, (int, np.integer)):
        return Rng(int(rng))
    raise TypeError(f"expected Rng or int seed, got {type(rng).__name__}")


@dataclass(frozen=True)
class Dataset:
    """N points in d-dimensional space, with optional integer labels and ids."""

    points: np.ndarray
    labels: np.ndarray | None = None
    ids: np.ndarray = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=np.float64)
        if pts.ndim != 2:
            raise ValueError(f"points must be 2-D, got shape {pts.shape}")
        n, d = pts.shape
        if n < 1 or d < 1:
            raise ValueError(f"need N >= 1 and d >= 1, got shape {pts.shape}")
        if not np.all(np.isfinite(pts)):
            raise ValueError("points contain non-finite entries")
        object.__setattr__(self, "points", pts)
        if self.labels is not None:
            labels = np.asarray(self.labels, dtype=np.int64)
            if labels.shape != (n,):
                raise ValueError(
                    f"labels must have length {n}, got shape {labels.shape}"
                )
            object.__setattr__(self, "labels", labels)
        ids = self.ids if self.ids is not None else np.arange(n)
        ids = np.asarray(ids)
        if ids.shape != (n,):
            raise ValueError(f"ids must have length {n}, got shape {ids.shape}")
        object.__setattr__(self, "ids", ids)

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def dim(self) -> int:
        return self.points.shape[1]


def as_points(data) -> np.ndarray:
    """Accept a Dataset or a raw (N, d) array and return the point matrix."""
    if isinstance(data, Dataset):
        return data.points
    pts = np.asarray(data, dtype=np.float64)
    if pts.ndim != 2:
        raise ValueError(f"expected (N, d) points, got shape {pts.shape}")
    return pts


@dataclass(frozen=True)
class Partition:
    """Assignment of [N] into num_groups groups."""

    assignment: np.ndarray
    num_groups: int

    def __post_init__(self):
        assignment = np.asarray(self.assignment, dtype=np.int64)
        if assignment.ndim != 1:
            raise ValueError("assignment must be a 1-D integer sequence")
        object.__setattr__(self, "assignment", assignment)
        object.__setattr__(self, "num_groups", int(self.num_groups))
        if self.num_groups < 1:
            raise ValueError("num_groups must be >= 1")
        if assignment.size and (
            assignment.min() < 0 or assignment.max() >= self.num_groups
        ):
            raise ValueError("assignment contains group indices out of range")

    @property
    def n(self) -> int:
        return self.assignment.shape[0]

    @property
    def sizes(self) -> np.ndarray:
        return np.bincount(self.assignment, minlength=self.num_groups)

    def groups(self) -> list[np.ndarray]:
        """Member index arrays per group, in ascending index order."""
        order = np.argsort(self.assignment, kind="stable")
        bounds = np.searchsorted(
            self.assignment[order], np.arange(self.num_groups + 1)
        )
        return [order[bounds[g] : bounds[g + 1]] for g in range(self.num_groups)]

    def key(self) -> frozenset:
        """Canonical label-free identity (set of member-index groups)."""
        return frozenset(frozenset(g.tolist()) for g in self.groups())


def partition_validate(part: Partition, n: int, balanced: bool = True) -> None:
    """Raise ValueError on the first violated partition constraint."""
    if part.n != n:
        raise ValueError(f"partition covers {part.n} items, expected {n}")
    sizes = part.sizes
    if np.any(sizes == 0):
        empty = int(np.flatnonzero(sizes == 0)[0])
        raise ValueError(f"group {empty} is empty")
    if balanced:
        spread = int(sizes.max() - sizes.min())
        if n % part.num_groups == 0:
            if spread != 0:
                raise ValueError(
                    f"sizes must be exactly equal (N divisible), spread={spread}"
                )
        elif spread > 1:
            raise ValueError(f"group sizes differ by {spread} (> 1)")


def random_balanced_assignment(n: int, groups: int, rng) -> Partition:
    """Uniform random balanced partition: shuffle indices, deal round-robin."""
    if groups > n:
        raise ValueError(f"cannot split {n} items into {groups} nonempty groups")
    if groups < 1:
        raise ValueError("need at least one group")
    rng = as_rng(rng)
    order = rng.permutation(n)
    assignment = np.empty(n, dtype=np.int64)
    assignment[order] = np.arange(n) % groups
    return Partition(assignment, groups)


def _parse_cell(text: str, row: int, col: int) -> float:
    try:
        value = float(text)
    except ValueError:
        raise ValueError(
            f"row {row}, column {col}: cannot parse {text!r} as a number"
        ) from None
    if not np.isfinite(value):
        raise ValueError(f"row {row}, column {col}: non-finite value {text!r}")
    return value


def dataset_from_csv(path, has_header: bool = False, label_column=None) -> Dataset:
    """Load a numeric CSV as a Dataset.

    label_column selects one column as integer labels: by name when the file
    has a header, by 0-based position otherwise.
    """
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    rows = [r for r in rows if r]  # tolerate trailing blank lines
    if not rows:
        raise ValueError(f"{path}: empty file")
    header = None
    if has_header:
        header = [h.strip() for h in rows[0]]
        rows = rows[1:]
        if not rows:
            raise ValueError(f"{path}: no data rows after header")
    width = len(rows[0])
    label_idx = None
    if label_column is not None:
        if isinstance(label_column, str) and header is not None:
            if label_column not in header:
                raise ValueError(f"label column {label_column!r} not in header")
            label_idx = header.index(label_column)
        elif isinstance(label_column, (int, np.integer)):
            label_idx = int(label_column)
        else:
            raise ValueError(
                "label_column must be a header name (with has_header) or an index"
            )
        if not 0 <= label_idx < width:
            raise ValueError(f"label column index {label_idx} out of range")
    points = []
    labels = [] if label_idx is not None else None
    for r, row in enumerate(rows):
        if len(row) != width:
            raise ValueError(
                f"row {r}: expected {width} cells, got {len(row)} (ragged rows)"
            )
        feature_row = []
        for c, cell in enumerate(row):
            if c == label_idx:
                labels.append(int(_parse_cell(cell.strip(), r, c)))
            else:
                feature_row.append(_parse_cell(cell.strip(), r, c))
        points.append(feature_row)
    return Dataset(np.asarray(points, dtype=np.float64), labels=labels)


def dataset_to_csv(data: Dataset, path, header: list[str] | None = None) -> None:
    """Write points (optionally with a header row) using round-trip float text."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        if header is not None:
            writer.writerow(header)
        for row in data.points:
            writer.writerow([repr(float(x)) for x in row])


def partition_to_csv(part: Partition, path, ids=None) -> None:
    """Write (id, group) rows, 0-based groups."""
    ids = np.arange(part.n) if ids is None else np.asarray(ids)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["id", "group"])
        for i, g in zip(ids, part.assignment):
            writer.writerow([i, int(g)])


def partition_from_csv(path) -> Partition:
    """Read a (id, group) partition file written by partition_to_csv."""
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    rows = [r for r in rows if r]
    if not rows:
        raise ValueError(f"{path}: empty partition file")
    if rows[0] and rows[0][0].strip().lower() == "id":
        rows = rows[1:]
    groups = [int(r[1]) for r in rows]
    assignment = np.asarray(groups, dtype=np.int64)
    return Partition(assignment, int(assignment.max()) + 1 if len(groups) else 1)


def variance(points) -> float:
    """Mean squared deviation from the mean (trace of the covariance)."""
    pts = np.asarray(points, dtype=np.float64)
    center = pts.mean(axis=0)
    return float(np.mean(np.sum((pts - center) ** 2, axis=1)))
