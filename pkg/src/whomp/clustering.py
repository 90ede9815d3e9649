"""Balanced K-means and the anticlustering exchange baseline."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import Partition, as_points, as_rng, random_balanced_assignment
from .transport import capacitated_assignment, match_uniform


@dataclass(frozen=True)
class BalancedKMeansResult:
    partition: Partition
    centers: np.ndarray
    objective: float  # sum over clusters of within-cluster variance
    iterations: int
    converged: bool
    sse_history: tuple[float, ...] = field(default=())


def cluster_capacities(n: int, k: int) -> np.ndarray:
    """Cluster sizes floor(n/k), remainder to the first n mod k clusters."""
    caps = np.full(k, n // k, dtype=np.int64)
    caps[: n % k] += 1
    return caps


def _objective(points, assignment, k) -> tuple[float, np.ndarray, float]:
    """(sum of cluster variances, cluster means, total within-cluster SSE)."""
    d = points.shape[1]
    centers = np.zeros((k, d))
    obj = 0.0
    sse = 0.0
    for g in range(k):
        members = points[assignment == g]
        mean = members.mean(axis=0)
        centers[g] = mean
        group_sse = float(np.sum((members - mean) ** 2))
        sse += group_sse
        obj += group_sse / members.shape[0]
    return obj, centers, sse


def balanced_kmeans(
    data,
    k: int,
    restarts: int = 16,
    tol: float = 1e-9,
    max_iter: int = 100,
    rng=0,
) -> BalancedKMeansResult:
    """Lloyd iteration with an exact capacitated-transport assignment step.

    Each restart samples k distinct data points as initial centers, then
    alternates capacity-constrained assignment and centroid updates until the
    squared transport distance between consecutive center sets drops to tol.
    The best restart by the sum of cluster variances wins; restart r draws
    from the child stream (seed, r).
    """
    points = as_points(data)
    n = points.shape[0]
    if k > n:
        raise ValueError(f"cannot form {k} nonempty clusters from {n} points")
    if k < 1:
        raise ValueError("k must be >= 1")
    caps = cluster_capacities(n, k)
    rng = as_rng(rng)
    best: BalancedKMeansResult | None = None
    for r in range(max(1, restarts)):
        stream = rng.child(r)
        centers = points[stream.choice(n, size=k, replace=False)]
        assignment = None
        converged = False
        iterations = 0
        history: list[float] = []
        for iterations in range(1, max_iter + 1):
            assignment, _ = capacitated_assignment(points, centers, caps)
            new_centers = np.stack(
                [points[assignment == g].mean(axis=0) for g in range(k)]
            )
            history.append(
                float(np.sum((points - new_centers[assignment]) ** 2))
            )
            _, eps_sq = match_uniform(centers, new_centers)
            centers = new_centers
            if eps_sq / k <= tol:
                converged = True
                break
        objective, centers, _ = _objective(points, assignment, k)
        candidate = BalancedKMeansResult(
            Partition(assignment, k),
            centers,
            objective,
            iterations,
            converged,
            tuple(history),
        )
        if best is None or candidate.objective < best.objective - 1e-15:
            best = candidate
    return best


def anticluster_exchange(data, groups: int, rng=0, max_sweeps: int = 500) -> Partition:
    """Maximize total within-group spread by greedy cross-group swaps.

    Starts from a random balanced assignment and repeatedly applies the best
    improving pairwise swap; swap-only moves keep the group sizes fixed.
    Maximizing the within-group sum of squares is the same as minimizing the
    size-weighted spread of the group centroids, so the swap deltas below
    track the centroid term sum_g ||S_g||^2 / n_g (to be minimized).
    """
    points = as_points(data)
    n = points.shape[0]
    part = random_balanced_assignment(n, groups, rng)
    assignment = part.assignment.copy()
    sizes = part.sizes.astype(np.float64)
    sums = np.zeros((groups, points.shape[1]))
    np.add.at(sums, assignment, points)
    for _ in range(max(1, max_sweeps)):
        best_delta = -1e-12
        best_swap = None
        members = [np.flatnonzero(assignment == g) for g in range(groups)]
        for g in range(groups - 1):
            xg = points[members[g]]
            old_g = float(np.sum(sums[g] ** 2)) / sizes[g]
            for h in range(g + 1, groups):
                xh = points[members[h]]
                old = old_g + float(np.sum(sums[h] ** 2)) / sizes[h]
                a = sums[g][None, :] - xg  # row i: S_g - x_i
                b = sums[h][None, :] - xh  # row j: S_h - y_j
                new_g = (
                    np.sum(a * a, axis=1)[:, None]
                    + 2.0 * (a @ xh.T)
                    + np.sum(xh * xh, axis=1)[None, :]
                ) / sizes[g]
                new_h = (
                    np.sum(b * b, axis=1)[None, :]
                    + 2.0 * (xg @ b.T)
                    + np.sum(xg * xg, axis=1)[:, None]
                ) / sizes[h]
                delta = new_g + new_h - old
                i, j = np.unravel_index(np.argmin(delta), delta.shape)
                if delta[i, j] < best_delta:
                    best_delta = float(delta[i, j])
                    best_swap = (members[g][i], members[h][j])
        if best_swap is None:
            break
        i, j = best_swap
        gi, gj = assignment[i], assignment[j]
        sums[gi] += points[j] - points[i]
        sums[gj] += points[i] - points[j]
        assignment[i], assignment[j] = gj, gi
    return Partition(assignment, groups)
