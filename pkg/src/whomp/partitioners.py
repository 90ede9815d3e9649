"""Subgroup partitioners: the two transport-based methods plus baselines.

Both transport-based methods first solve balanced K-means with N/m clusters
of size m, then either sample subgroups uniformly from the cluster-bijection
family (one member per cluster per subgroup) or align clusters through their
barycenter and group the aligned tuples.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import permutations

import numpy as np

from .barycenter import barycenter_exact_small, barycenter_multistart
from .clustering import anticluster_exchange, balanced_kmeans
from .core import Partition, as_points, as_rng, random_balanced_assignment

METHODS = (
    "random",
    "whomp_random",
    "whomp_matching",
    "covariate_adaptive",
    "anticluster",
)


@dataclass(frozen=True)
class SubgroupRequest:
    """How to split a dataset: method name, subgroup count, seed."""

    num_subgroups: int
    seed: int = 0
    method: str = "whomp_random"

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}; pick from {METHODS}")
        if self.num_subgroups < 2:
            raise ValueError("need at least 2 subgroups")

    def realize(self, data, **options) -> Partition:
        return make_partition(data, self.method, self.num_subgroups,
                              rng=self.seed, **options)


@dataclass(frozen=True)
class PocockSimonConfig:
    """Minimization settings: quantile bins, biased-coin probability, weights.

    Defaults (2 bins per covariate, bias 0.75, unit weights) are the common
    choices in the minimization literature; the method itself only pins the
    imbalance-score shape.
    """

    bins_per_covariate: int = 2
    assignment_bias: float = 0.75
    covariate_weights: tuple[float, ...] | None = None

    def __post_init__(self):
        if not 0.5 < self.assignment_bias <= 1.0:
            raise ValueError("assignment_bias must lie in (0.5, 1]")
        if self.bins_per_covariate < 1:
            raise ValueError("bins_per_covariate must be >= 1")
        if self.covariate_weights is not None:
            if any(w < 0 for w in self.covariate_weights):
                raise ValueError("covariate weights must be nonnegative")


class QPSampler:
    """Uniform sampler over the subgroup partitions selected from fixed
    clusters (one member per cluster per subgroup, via per-cluster shuffles).

    With cluster sizes m (divisible case) the draw is uniform over the whole
    bijection family; sizes m and m+1 deal the overflow round-robin so the
    output stays balanced within one.
    """

    def __init__(self, clusters: Partition, num_subgroups: int):
        self.clusters = clusters
        self.num_subgroups = int(num_subgroups)
        self.members = clusters.groups()
        if min(len(g) for g in self.members) < 1:
            raise ValueError("clusters must be nonempty")

    def sample(self, rng) -> Partition:
        rng = as_rng(rng)
        m = self.num_subgroups
        k = len(self.members)
        n = self.clusters.n
        shuffled = [g[rng.permutation(len(g))] for g in self.members]
        assignment = np.empty(n, dtype=np.int64)
        sizes = np.zeros(m, dtype=np.int64)
        max_size = max(len(g) for g in shuffled)
        for pos in range(max_size):
            column = [g[pos] for g in shuffled if len(g) > pos]
            if pos < m and len(column) == k:
                for idx in column:
                    assignment[idx] = pos
                sizes[pos] += len(column)
            else:
                for idx in column:
                    target = int(np.argmin(sizes))
                    assignment[idx] = target
                    sizes[target] += 1
        return Partition(assignment, m)


class RandomSplitSampler:
    """Pure random balanced splits of n items (the randomization baseline)."""

    def __init__(self, n: int, num_subgroups: int):
        self.n = int(n)
        self.num_subgroups = int(num_subgroups)

    def sample(self, rng) -> Partition:
        return random_balanced_assignment(self.n, self.num_subgroups, rng)


def _derived_cluster_count(n: int, m: int, strict: bool) -> int:
    if m < 2 or m > n:
        raise ValueError(f"need 2 <= subgroups <= {n}, got {m}")
    if n % m != 0 and strict:
        raise ValueError(f"{m} subgroups do not divide {n} points (strict mode)")
    return n // m


def whomp_random(
    data,
    m: int,
    rng=0,
    restarts: int = 16,
    strict: bool = False,
    return_clusters: bool = False,
):
    """Cluster into N/m balanced groups, then draw one member per cluster
    per subgroup uniformly at random (without replacement).
    """
    points = as_points(data)
    rng = as_rng(rng)
    k = _derived_cluster_count(points.shape[0], m, strict)
    result = balanced_kmeans(points, k, restarts=restarts, rng=rng.child(0))
    sampler = QPSampler(result.partition, m)
    subgroups = sampler.sample(rng.child(1))
    if return_clusters:
        return subgroups, result.partition
    return subgroups


def whomp_matching(
    data,
    m: int,
    rng=0,
    restarts: int = 16,
    barycenter_method: str = "fixed_point",
    barycenter_restarts: int = 8,
    return_clusters: bool = False,
):
    """Cluster into N/m balanced groups, align the clusters through their
    barycenter, and group the aligned tuples into subgroups.

    Subgroup j collects, across clusters, the point matched to barycenter
    point j; among all one-per-cluster selections this minimizes the average
    within-subgroup variance.  Requires m to divide N (the barycenter needs
    equal cluster sizes).
    """
    points = as_points(data)
    n = points.shape[0]
    if n % m != 0:
        raise ValueError(
            f"matching partitioner needs subgroups to divide N ({m} vs {n})"
        )
    rng = as_rng(rng)
    k = _derived_cluster_count(n, m, strict=True)
    result = balanced_kmeans(points, k, restarts=restarts, rng=rng.child(0))
    member_lists = result.partition.groups()
    clouds = np.stack([points[g] for g in member_lists])
    if barycenter_method == "exact":
        bary = barycenter_exact_small(clouds)
    elif barycenter_method == "fixed_point":
        bary = barycenter_multistart(
            clouds, rng=rng.child(1), extra_random=max(1, barycenter_restarts)
        )
    else:
        raise ValueError(f"unknown barycenter method {barycenter_method!r}")
    assignment = np.empty(n, dtype=np.int64)
    for p, members in enumerate(member_lists):
        for j in range(m):
            assignment[members[bary.matchings[p, j]]] = j
    subgroups = Partition(assignment, m)
    if return_clusters:
        return subgroups, result.partition
    return subgroups


def pocock_simon(data, m: int, config: PocockSimonConfig | None = None, rng=0) -> Partition:
    """Covariate-adaptive minimization with a biased coin.

    Units are processed in a seeded random order; continuous covariates are
    discretized into quantile bins; each unit goes to the group minimizing
    the weighted sum over covariates of the across-group range of bin counts
    (computed as if the unit were assigned there) with probability
    assignment_bias, otherwise uniformly among the remaining open groups.
    Groups at capacity ceil(N/m) stop receiving units.
    """
    config = config or PocockSimonConfig()
    points = as_points(data)
    n, d = points.shape
    if m < 2:
        raise ValueError("need at least 2 groups")
    rng = as_rng(rng)
    bins = np.empty((n, d), dtype=np.int64)
    nbins = config.bins_per_covariate
    for j in range(d):
        if nbins == 1:
            bins[:, j] = 0
        else:
            qs = np.quantile(points[:, j], np.arange(1, nbins) / nbins)
            bins[:, j] = np.searchsorted(qs, points[:, j], side="right")
    weights = (
        np.ones(d)
        if config.covariate_weights is None
        else np.asarray(config.covariate_weights, dtype=np.float64)
    )
    if weights.shape != (d,):
        raise ValueError(f"need one covariate weight per dimension ({d})")
    counts = np.zeros((d, nbins, m), dtype=np.int64)
    sizes = np.zeros(m, dtype=np.int64)
    capacity = -(-n // m)  # ceil
    assignment = np.empty(n, dtype=np.int64)
    order = rng.permutation(n)
    coin = rng.child(1)
    for unit in order:
        open_groups = np.flatnonzero(sizes < capacity)
        scores = np.zeros(len(open_groups))
        for idx, g in enumerate(open_groups):
            score = 0.0
            for j in range(d):
                row = counts[j, bins[unit, j]].copy()
                row[g] += 1
                score += weights[j] * (row.max() - row.min())
            scores[idx] = score
        best_mask = scores <= scores.min() + 1e-12
        best = open_groups[best_mask]
        rest = open_groups[~best_mask]
        if len(rest) == 0 or coin.random() < config.assignment_bias:
            pool = best
        else:
            pool = rest
        g = int(pool[coin.integers(len(pool))])
        assignment[unit] = g
        sizes[g] += 1
        for j in range(d):
            counts[j, bins[unit, j], g] += 1
    return Partition(assignment, m)


def enumerate_QP(clusters: Partition, budget: int = 1_000_000):
    """Iterate every subgroup partition formed by cluster-to-cluster
    bijections (the first cluster's order is fixed, so the count is
    (c!)^(K-1) for K clusters of size c)."""
    members = clusters.groups()
    k = len(members)
    sizes = {len(g) for g in members}
    if len(sizes) != 1:
        raise ValueError("enumeration requires equal-size clusters")
    c = sizes.pop()
    total = math.factorial(c) ** (k - 1)
    if total > budget:
        raise ValueError(f"enumeration needs {total} partitions, budget {budget}")
    n = clusters.n
    perms = list(permutations(range(c)))

    def build(perm_choice):
        assignment = np.empty(n, dtype=np.int64)
        for j in range(c):
            assignment[members[0][j]] = j
        for p in range(1, k):
            sigma = perm_choice[p - 1]
            for j in range(c):
                assignment[members[p][sigma[j]]] = j
        return Partition(assignment, c)

    if k == 1:
        yield build(())
        return
    indices = [0] * (k - 1)
    while True:
        yield build([perms[i] for i in indices])
        pos = k - 2
        while pos >= 0:
            indices[pos] += 1
            if indices[pos] < len(perms):
                break
            indices[pos] = 0
            pos -= 1
        if pos < 0:
            return


def make_partition(
    data,
    method: str,
    m: int,
    rng=0,
    pocock_config: PocockSimonConfig | None = None,
    **options,
) -> Partition:
    """Dispatch a SubgroupRequest-style call to the named partitioner."""
    points = as_points(data)
    rng = as_rng(rng)
    if method == "random":
        return random_balanced_assignment(points.shape[0], m, rng)
    if method == "whomp_random":
        return whomp_random(points, m, rng=rng, **options)
    if method == "whomp_matching":
        return whomp_matching(points, m, rng=rng, **options)
    if method == "covariate_adaptive":
        return pocock_simon(points, m, config=pocock_config, rng=rng)
    if method == "anticluster":
        return anticluster_exchange(points, m, rng=rng, **options)
    raise ValueError(f"unknown method {method!r}; pick from {METHODS}")
