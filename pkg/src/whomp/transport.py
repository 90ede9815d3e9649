"""Exact discrete optimal transport for squared Euclidean cost.

All solvers are exact (assignment or linear programming); no entropic
regularization anywhere.  Uniform measures with commensurable sizes are
expanded to a common unit-atom count and solved as an assignment problem,
which keeps every identity used by the theory tests exact to rounding.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment, linprog

from ._kernels import pairwise_sqdist, w2_1d_sqcost

# Largest unit-atom count for the common-denominator expansion; beyond this
# the transportation LP is used instead.
_MAX_EXPANSION = 4096


@dataclass(frozen=True)
class DiscreteMeasure:
    """Weighted point cloud: (n, d) support with probability weights."""

    support: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        support = np.asarray(self.support, dtype=np.float64)
        if support.ndim == 1:
            support = support[:, None]
        if support.ndim != 2 or support.shape[0] < 1:
            raise ValueError(f"support must be (n, d), got shape {support.shape}")
        if not np.all(np.isfinite(support)):
            raise ValueError("support contains non-finite entries")
        weights = np.asarray(self.weights, dtype=np.float64)
        if weights.shape != (support.shape[0],):
            raise ValueError("weights must be one per support point")
        if np.any(weights < 0) or not np.all(np.isfinite(weights)):
            raise ValueError("weights must be finite and nonnegative")
        if abs(float(weights.sum()) - 1.0) > 1e-12:
            raise ValueError(f"weights sum to {weights.sum()!r}, expected 1")
        object.__setattr__(self, "support", support)
        object.__setattr__(self, "weights", weights)

    @classmethod
    def uniform(cls, points) -> "DiscreteMeasure":
        pts = np.asarray(points, dtype=np.float64)
        if pts.ndim == 1:
            pts = pts[:, None]
        n = pts.shape[0]
        return cls(pts, np.full(n, 1.0 / n))

    @property
    def n(self) -> int:
        return self.support.shape[0]

    @property
    def dim(self) -> int:
        return self.support.shape[1]

    def is_uniform(self, tol: float = 1e-12) -> bool:
        return bool(np.all(np.abs(self.weights - 1.0 / self.n) <= tol))


@dataclass(frozen=True)
class TransportPlan:
    """Sparse coupling between two discrete measures.

    cost is the mass-weighted sum of squared distances over the entries.
    """

    source_index: np.ndarray
    target_index: np.ndarray
    mass: np.ndarray
    cost: float

    def marginals(self, n_source: int, n_target: int):
        row = np.zeros(n_source)
        col = np.zeros(n_target)
        np.add.at(row, self.source_index, self.mass)
        np.add.at(col, self.target_index, self.mass)
        return row, col


def match_uniform(a, b):
    """Minimum-cost bijection between two equal-count point lists.

    Returns (sigma, cost): sigma[i] is the index in b matched to a[i] and
    cost is the total squared distance over the matching.
    """
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.ndim == 1:
        a = a[:, None]
    if b.ndim == 1:
        b = b[:, None]
    if a.shape[0] != b.shape[0]:
        raise ValueError(f"point counts differ: {a.shape[0]} vs {b.shape[0]}")
    if a.shape[1] != b.shape[1]:
        raise ValueError(f"dimensions differ: {a.shape[1]} vs {b.shape[1]}")
    cost_matrix = pairwise_sqdist(a, b)
    rows, cols = linear_sum_assignment(cost_matrix)
    sigma = np.empty(a.shape[0], dtype=np.int64)
    sigma[rows] = cols
    return sigma, float(np.sum(cost_matrix[rows, cols]))


def _expanded_assignment_plan(a: DiscreteMeasure, b: DiscreteMeasure):
    """Solve uniform-to-uniform transport by unit-atom expansion."""
    na, nb = a.n, b.n
    lcm = na * nb // math.gcd(na, nb)
    src = np.repeat(np.arange(na), lcm // na)
    dst = np.repeat(np.arange(nb), lcm // nb)
    sigma, raw_cost = match_uniform(a.support[src], b.support[dst])
    pair_src = src
    pair_dst = dst[sigma]
    # Aggregate duplicate (i, j) unit atoms into single plan entries.
    keys = pair_src * nb + pair_dst
    uniq, counts = np.unique(keys, return_counts=True)
    source_index = uniq // nb
    target_index = uniq % nb
    mass = counts / float(lcm)
    return TransportPlan(source_index, target_index, mass, raw_cost / lcm)


def _repair_forest_masses(source_index, target_index, na, nb, wa, wb):
    """Recompute plan masses exactly from the marginals on a support forest.

    Basic LP solutions are supported on a forest of the bipartite graph, so
    peeling degree-1 nodes determines every mass directly from the weights.
    Returns None if the support contains a cycle (degenerate numerics).
    """
    n_edges = len(source_index)
    mass = np.zeros(n_edges)
    residual = np.concatenate([wa.astype(np.float64), wb.astype(np.float64)])
    incident: list[set[int]] = [set() for _ in range(na + nb)]
    for e in range(n_edges):
        incident[source_index[e]].add(e)
        incident[na + target_index[e]].add(e)
    stack = [u for u in range(na + nb) if len(incident[u]) == 1]
    removed = np.zeros(n_edges, dtype=bool)
    done = 0
    while stack:
        u = stack.pop()
        if len(incident[u]) != 1:
            continue
        e = next(iter(incident[u]))
        mass[e] = residual[u]
        v = na + target_index[e] if u < na else int(source_index[e])
        residual[u] = 0.0
        residual[v] -= mass[e]
        incident[u].discard(e)
        incident[v].discard(e)
        removed[e] = True
        done += 1
        if len(incident[v]) == 1:
            stack.append(v)
    if done != n_edges:
        return None
    return np.maximum(mass, 0.0)


def _lp_plan(a: DiscreteMeasure, b: DiscreteMeasure) -> TransportPlan:
    """General transportation LP (HiGHS), with exact mass repair on the basis."""
    na, nb = a.n, b.n
    cost_matrix = pairwise_sqdist(a.support, b.support)
    c = cost_matrix.ravel()
    # Row-sum constraints for every source, column sums for all targets but
    # the last (redundant given total mass 1).
    n_rows = na + nb - 1
    a_eq = np.zeros((n_rows, na * nb))
    for i in range(na):
        a_eq[i, i * nb : (i + 1) * nb] = 1.0
    for j in range(nb - 1):
        a_eq[na + j, j::nb] = 1.0
    b_eq = np.concatenate([a.weights, b.weights[:-1]])
    res = linprog(c, A_eq=a_eq, b_eq=b_eq, bounds=(0, None), method="highs")
    if not res.success:
        raise RuntimeError(f"transport LP failed: {res.message}")
    x = res.x.reshape(na, nb)
    keep = x > 1e-11
    src, dst = np.nonzero(keep)
    repaired = _repair_forest_masses(src, dst, na, nb, a.weights, b.weights)
    mass = repaired if repaired is not None else x[src, dst]
    cost = float(np.sum(mass * cost_matrix[src, dst]))
    return TransportPlan(src, dst, mass, cost)


def w2_exact(a: DiscreteMeasure, b: DiscreteMeasure):
    """Exact Wasserstein-2 distance and an optimal plan.

    Returns (distance, plan) with distance = sqrt(plan.cost).
    """
    if a.dim != b.dim:
        raise ValueError(f"dimension mismatch: {a.dim} vs {b.dim}")
    use_expansion = (
        a.is_uniform()
        and b.is_uniform()
        and a.n * b.n // math.gcd(a.n, b.n) <= _MAX_EXPANSION
    )
    plan = _expanded_assignment_plan(a, b) if use_expansion else _lp_plan(a, b)
    return math.sqrt(max(plan.cost, 0.0)), plan


def w2_1d(a: DiscreteMeasure, b: DiscreteMeasure) -> float:
    """Closed-form Wasserstein-2 distance between 1-D measures."""
    if a.dim != 1 or b.dim != 1:
        raise ValueError("w2_1d requires one-dimensional supports")
    xs = a.support[:, 0]
    ys = b.support[:, 0]
    ox = np.argsort(xs, kind="stable")
    oy = np.argsort(ys, kind="stable")
    sq = w2_1d_sqcost(xs[ox], a.weights[ox], ys[oy], b.weights[oy])
    return math.sqrt(max(sq, 0.0))


def capacitated_assignment(points, centers, capacities):
    """Assign points to centers at exact per-center capacities, min total
    squared distance.

    capacities may be a single int (same for every center) or a per-center
    array; the capacities must sum to the number of points.  Returns
    (assignment, cost) with assignment[i] the center index of point i.
    """
    pts = np.asarray(points, dtype=np.float64)
    ctr = np.asarray(centers, dtype=np.float64)
    k = ctr.shape[0]
    if np.isscalar(capacities) or np.ndim(capacities) == 0:
        caps = np.full(k, int(capacities), dtype=np.int64)
    else:
        caps = np.asarray(capacities, dtype=np.int64)
        if caps.shape != (k,):
            raise ValueError("need one capacity per center")
    if caps.sum() != pts.shape[0]:
        raise ValueError(
            f"capacities sum to {caps.sum()}, expected {pts.shape[0]} points"
        )
    expanded = np.repeat(np.arange(k), caps)
    cost_matrix = pairwise_sqdist(pts, ctr)[:, expanded]
    rows, cols = linear_sum_assignment(cost_matrix)
    assignment = np.empty(pts.shape[0], dtype=np.int64)
    assignment[rows] = expanded[cols]
    return assignment, float(np.sum(cost_matrix[rows, cols]))
