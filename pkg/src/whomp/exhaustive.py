"""Exhaustive small-instance oracles.

Everything here enumerates partitions outright and is meant for test-scale
inputs only (N up to about 12).  The production algorithms are checked
against these independent computations.
"""

from __future__ import annotations

import math
from itertools import combinations

import numpy as np

from .core import Partition, as_points
from .transport import DiscreteMeasure, w2_exact


def count_equal_partitions(n: int, groups: int) -> int:
    size, rem = divmod(n, groups)
    if rem:
        raise ValueError(f"{groups} does not divide {n}")
    return math.factorial(n) // (
        math.factorial(size) ** groups * math.factorial(groups)
    )


def equal_partitions(n: int, groups: int):
    """Yield every partition of range(n) into equal-size unordered groups.

    Groups are emitted as tuples; the first remaining index anchors each
    group, so no partition appears twice.
    """
    size, rem = divmod(n, groups)
    if rem:
        raise ValueError(f"{groups} does not divide {n}")

    def rec(remaining: tuple[int, ...]):
        if not remaining:
            yield ()
            return
        first, rest = remaining[0], remaining[1:]
        for companions in combinations(rest, size - 1):
            group = (first,) + companions
            taken = set(companions)
            leftover = tuple(i for i in rest if i not in taken)
            for tail in rec(leftover):
                yield (group,) + tail

    yield from rec(tuple(range(n)))


def groups_to_partition(groups_tuple, n: int) -> Partition:
    assignment = np.empty(n, dtype=np.int64)
    for g, members in enumerate(groups_tuple):
        for i in members:
            assignment[i] = g
    return Partition(assignment, len(groups_tuple))


def sum_group_variances(points, groups_tuple) -> float:
    """Sum over groups of the within-group variance."""
    total = 0.0
    for members in groups_tuple:
        sub = points[list(members)]
        mean = sub.mean(axis=0)
        total += float(np.mean(np.sum((sub - mean) ** 2, axis=1)))
    return total


def whomp_objective(points, groups_tuple) -> float:
    """Sum over groups of the squared W2 distance to the full sample."""
    points = as_points(points)
    full = DiscreteMeasure.uniform(points)
    total = 0.0
    for members in groups_tuple:
        _, plan = w2_exact(DiscreteMeasure.uniform(points[list(members)]), full)
        total += plan.cost
    return total


def _optima(values, tol: float):
    best = min(values)
    return best, [i for i, v in enumerate(values) if v <= best + tol]


def min_variance_clustering(points, k: int, tol: float = 1e-9):
    """Exhaustive balanced clustering optimum.

    Returns (best objective, list of optimal partitions-as-group-tuples,
    all enumerated group tuples, their objectives).
    """
    points = as_points(points)
    parts = list(equal_partitions(points.shape[0], k))
    values = [sum_group_variances(points, p) for p in parts]
    best, idx = _optima(values, tol)
    return best, [parts[i] for i in idx], parts, values


def min_whomp_partition(points, groups: int, tol: float = 1e-9):
    """Exhaustive optimum of the homogeneity objective over balanced
    partitions into `groups` subgroups."""
    points = as_points(points)
    parts = list(equal_partitions(points.shape[0], groups))
    values = [whomp_objective(points, p) for p in parts]
    best, idx = _optima(values, tol)
    return best, [parts[i] for i in idx], parts, values
