"""Free-support barycenter of equal-size uniform point clouds.

The barycenter of K clouds of c points each is supported on c points; the
solver also returns, per cloud, the bijection aligning barycenter points to
cloud points.  Those bijections are what the matching partitioner groups by.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import permutations

import numpy as np

from .core import as_rng
from .transport import match_uniform


@dataclass(frozen=True)
class BarycenterResult:
    """Barycenter support plus per-cloud alignments.

    matchings[p, j] is the index in cloud p matched to support point j, so
    each support point is (at a fixed point) the mean of its matched tuple.
    cost is the summed squared transport cost to all clouds, i.e.
    sum_p (1/c) sum_j ||support_j - cloud_p[matchings[p, j]]||^2.
    """

    support: np.ndarray
    matchings: np.ndarray
    cost: float
    iterations: int = 0
    converged: bool = True


def _stack_clusters(clusters) -> np.ndarray:
    arr = np.asarray(clusters, dtype=np.float64)
    if arr.ndim != 3:
        sizes = {np.asarray(c).shape for c in clusters}
        raise ValueError(f"clusters must share one (c, d) shape, got {sizes}")
    return arr


def _matched_cost(support, clouds, matchings) -> float:
    c = support.shape[0]
    gathered = np.stack([clouds[p][matchings[p]] for p in range(len(clouds))])
    return float(np.sum((gathered - support[None, :, :]) ** 2) / c)


def barycenter_fixed_point(
    clusters, init=0, tol: float = 1e-10, max_iter: int = 200
) -> BarycenterResult:
    """Alternate optimal matchings and tuple-mean updates until the cost
    stops decreasing.

    init is either a cluster index used as the starting support or an
    explicit (c, d) array.  The returned cost is non-increasing across
    iterations; the result is a fixed point (re-matching cannot reduce it)
    but not necessarily the global optimum.
    """
    clouds = _stack_clusters(clusters)
    k, c, d = clouds.shape
    if isinstance(init, (int, np.integer)):
        support = clouds[int(init)].copy()
    else:
        support = np.asarray(init, dtype=np.float64).copy()
        if support.shape != (c, d):
            raise ValueError(f"init support must be ({c}, {d})")
    matchings = np.zeros((k, c), dtype=np.int64)
    prev_cost = math.inf
    iterations = 0
    converged = False
    for iterations in range(1, max_iter + 1):
        cost = 0.0
        for p in range(k):
            sigma, raw = match_uniform(support, clouds[p])
            matchings[p] = sigma
            cost += raw / c
        if prev_cost - cost < tol:
            converged = True
            break
        prev_cost = cost
        gathered = np.stack([clouds[p][matchings[p]] for p in range(k)])
        support = gathered.mean(axis=0)
    final_cost = _matched_cost(support, clouds, matchings)
    return BarycenterResult(support, matchings, final_cost, iterations, converged)


def barycenter_multistart(
    clusters, rng=0, tol: float = 1e-10, max_iter: int = 200, extra_random: int = 8
) -> BarycenterResult:
    """Best fixed point over one restart per cluster plus random-subset inits.

    Random inits draw c points from the pooled cloud without replacement;
    eight of them by default, which drove the observed local-optimum rate to
    zero on small random instances.  Ties between restarts keep the earliest.
    """
    clouds = _stack_clusters(clusters)
    k, c, d = clouds.shape
    rng = as_rng(rng)
    best: BarycenterResult | None = None
    pooled = clouds.reshape(k * c, d)
    for r in range(k + max(0, extra_random)):
        if r < k:
            init = r
        else:
            pick = rng.child(r).choice(k * c, size=c, replace=False)
            init = pooled[pick]
        result = barycenter_fixed_point(clouds, init=init, tol=tol, max_iter=max_iter)
        if best is None or result.cost < best.cost - 1e-15:
            best = result
    return best


def barycenter_exact_small(clusters, budget: int = 2_000_000) -> BarycenterResult:
    """Global barycenter by exhaustive search over alignment tuples.

    Fixing the first cloud's order, enumerates every tuple of permutations of
    the remaining clouds; the optimal support for a tuple is the tuple means,
    so the search is exact.  Errors out when (c!)^(K-1) exceeds the budget.
    """
    clouds = _stack_clusters(clusters)
    k, c, d = clouds.shape
    if math.factorial(c) > 5040:
        raise ValueError(f"cloud size {c} too large for exhaustive matching")
    n_tuples = math.factorial(c) ** (k - 1)
    if n_tuples > budget:
        raise ValueError(
            f"enumeration needs {n_tuples} tuples, budget is {budget}"
        )
    perms = np.array(list(permutations(range(c))), dtype=np.int64)
    # sums[t] accumulates the aligned tuple sums for enumeration index t;
    # the index is mixed-radix over per-cloud permutation choices.
    sums = clouds[0][None, :, :]
    for p in range(1, k):
        permuted = clouds[p][perms]  # (c!, c, d)
        sums = (sums[:, None, :, :] + permuted[None, :, :, :]).reshape(-1, c, d)
    # cost = (total_sq - K * sum_j ||mean_j||^2) / c, so the argmin maximizes
    # the summed squared norms of the tuple means.
    mean_sq = np.einsum("tjd,tjd->t", sums, sums) / (k * k)
    best_t = int(np.argmax(mean_sq))
    total_sq = float(np.sum(clouds * clouds))
    cost = (total_sq - k * float(mean_sq[best_t])) / c
    support = sums[best_t] / k
    matchings = np.zeros((k, c), dtype=np.int64)
    matchings[0] = np.arange(c)
    remainder = best_t
    n_perms = perms.shape[0]
    for p in range(k - 1, 0, -1):
        matchings[p] = perms[remainder % n_perms]
        remainder //= n_perms
    return BarycenterResult(support, matchings, cost)
