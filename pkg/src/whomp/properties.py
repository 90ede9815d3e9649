"""Theory and contract checks shared by the self-test CLI and the test suite.

Each check runs an independent computation (enumeration, brute force, or
Monte Carlo) against the production code path and returns a PropertyResult.
Scales are keyword arguments so the acceptance suite can run each check at
its contract scale while the CLI self-test uses faster defaults.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from itertools import permutations

import numpy as np

from .barycenter import barycenter_exact_small, barycenter_multistart
from .clustering import anticluster_exchange, balanced_kmeans
from .core import Partition, Rng, as_rng, variance
from .exhaustive import (
    equal_partitions,
    groups_to_partition,
    min_variance_clustering,
    min_whomp_partition,
    sum_group_variances,
    whomp_objective,
)
from .graphs import (
    Graph,
    laplacian_spectrum,
    sbm_generate,
    spectral_embedding,
    subgraph_spectrum_w2,
)
from .metrics import (
    ate_randomization_test,
    ate_variance_bound_check,
    homogeneity_report,
    lipschitz_discrepancy,
    normalized_entropy,
)
from .partitioners import (
    QPSampler,
    RandomSplitSampler,
    enumerate_QP,
    make_partition,
    whomp_matching,
    whomp_random,
)
from .synthetic import (
    duplicated_cluster_instance,
    gmm_sample,
    linear_outcomes,
    triple_ring_instance,
)
from .transport import DiscreteMeasure, capacitated_assignment, match_uniform, w2_1d, w2_exact


@dataclass
class PropertyResult:
    name: str
    passed: bool
    seconds: float
    detail: str

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"{status}  {self.name}  ({self.seconds:.2f}s)  {self.detail}"


def _result(name, start, passed, detail) -> PropertyResult:
    return PropertyResult(name, bool(passed), time.perf_counter() - start, detail)


def _random_measure(rng: Rng, n: int, d: int, uniform: bool) -> DiscreteMeasure:
    support = rng.normal(size=(n, d))
    if uniform:
        return DiscreteMeasure.uniform(support)
    cuts = np.sort(rng.random(n - 1)) if n > 1 else np.empty(0)
    weights = np.diff(np.concatenate([[0.0], cuts, [1.0]]))
    return DiscreteMeasure(support, weights)


def _default_w2(a, b):
    return w2_exact(a, b)[0]


def check_metric_axioms(instances=200, max_n=8, max_d=3, seed=0, w2_fn=None) -> PropertyResult:
    """Nonnegativity, symmetry, identity, and triangle inequality of the
    exact solver on random small measures (uniform and general weights)."""
    start = time.perf_counter()
    w2 = w2_fn or _default_w2
    rng = as_rng(seed)
    worst = 0.0
    for t in range(instances):
        g = rng.child(t)
        d = int(g.integers(1, max_d + 1))
        sizes = g.integers(1, max_n + 1, size=3)
        uniform = bool(g.integers(2))
        ms = [_random_measure(g.child(i), int(sizes[i]), d, uniform) for i in range(3)]
        dab, dba = w2(ms[0], ms[1]), w2(ms[1], ms[0])
        if dab < 0:
            return _result("transport.metric_axioms", start, False, f"negative distance {dab}")
        if abs(dab - dba) > 1e-10:
            return _result("transport.metric_axioms", start, False, f"asymmetry {abs(dab-dba)}")
        if w2(ms[0], ms[0]) > 1e-10:
            return _result("transport.metric_axioms", start, False, "self-distance > 1e-10")
        slack = w2(ms[0], ms[2]) - (dab + w2(ms[1], ms[2]))
        worst = max(worst, slack)
        if slack > 1e-9:
            return _result("transport.metric_axioms", start, False, f"triangle violated by {slack}")
    return _result(
        "transport.metric_axioms", start, True,
        f"{instances} instances, worst triangle slack {worst:.2e}",
    )


def check_permutation_oracle(instances=60, max_n=6, seed=1) -> PropertyResult:
    """match_uniform against brute force over all permutations; w2_exact cost
    equals the matching cost (scaled by 1/n) for uniform equal-size inputs."""
    start = time.perf_counter()
    rng = as_rng(seed)
    for t in range(instances):
        g = rng.child(t)
        n = int(g.integers(2, max_n + 1))
        d = int(g.integers(1, 4))
        a = g.normal(size=(n, d))
        b = g.normal(size=(n, d))
        _, cost = match_uniform(a, b)
        brute = min(
            sum(float(np.sum((a[i] - b[p[i]]) ** 2)) for i in range(n))
            for p in permutations(range(n))
        )
        if abs(cost - brute) > 1e-9:
            return _result("transport.permutation_oracle", start, False,
                           f"n={n}: assignment {cost} vs brute {brute}")
        _, plan = w2_exact(DiscreteMeasure.uniform(a), DiscreteMeasure.uniform(b))
        if abs(plan.cost - cost / n) > 1e-12:
            return _result("transport.permutation_oracle", start, False,
                           "plan cost differs from matching cost / n")
    return _result("transport.permutation_oracle", start, True, f"{instances} instances")


def check_w2_1d_closed_form(instances=50, seed=2) -> PropertyResult:
    """Quantile-walk distance equals the exact solver on 1-D measures."""
    start = time.perf_counter()
    rng = as_rng(seed)
    worst = 0.0
    for t in range(instances):
        g = rng.child(t)
        na, nb = int(g.integers(1, 9)), int(g.integers(1, 9))
        uniform = bool(g.integers(2))
        a = _random_measure(g.child(0), na, 1, uniform)
        b = _random_measure(g.child(1), nb, 1, uniform)
        gap = abs(w2_1d(a, b) - w2_exact(a, b)[0])
        worst = max(worst, gap)
        if gap > 1e-10:
            return _result("transport.w2_1d", start, False, f"gap {gap}")
    return _result("transport.w2_1d", start, True, f"{instances} instances, worst gap {worst:.1e}")


def check_plan_marginals(instances=50, seed=3) -> PropertyResult:
    start = time.perf_counter()
    rng = as_rng(seed)
    worst = 0.0
    for t in range(instances):
        g = rng.child(t)
        na, nb = int(g.integers(1, 9)), int(g.integers(1, 9))
        uniform = bool(g.integers(2))
        a = _random_measure(g.child(0), na, 2, uniform)
        b = _random_measure(g.child(1), nb, 2, uniform)
        dist, plan = w2_exact(a, b)
        row, col = plan.marginals(na, nb)
        err = max(np.max(np.abs(row - a.weights)), np.max(np.abs(col - b.weights)))
        worst = max(worst, err)
        if err > 1e-10:
            return _result("transport.plan_marginals", start, False, f"marginal error {err}")
        support_cost = float(
            np.sum(plan.mass * np.sum(
                (a.support[plan.source_index] - b.support[plan.target_index]) ** 2, axis=1))
        )
        if abs(support_cost - plan.cost) > 1e-10:
            return _result("transport.plan_marginals", start, False, "cost does not match entries")
    return _result("transport.plan_marginals", start, True,
                   f"{instances} instances, worst marginal error {worst:.1e}")


def check_translation_covariance(instances=30, seed=4) -> PropertyResult:
    """Common shifts leave W2 unchanged; a one-sided shift obeys the exact
    mean/centered decomposition."""
    start = time.perf_counter()
    rng = as_rng(seed)
    for t in range(instances):
        g = rng.child(t)
        n, m, d = int(g.integers(2, 7)), int(g.integers(2, 7)), int(g.integers(1, 4))
        a = _random_measure(g.child(0), n, d, True)
        b = _random_measure(g.child(1), m, d, True)
        shift = g.normal(size=d)
        base = w2_exact(a, b)[0]
        both = w2_exact(
            DiscreteMeasure(a.support + shift, a.weights),
            DiscreteMeasure(b.support + shift, b.weights),
        )[0]
        if abs(base - both) > 1e-10:
            return _result("transport.translation", start, False, f"common shift moved W2 by {abs(base-both)}")
        mean_a = a.support.T @ a.weights
        mean_b = b.support.T @ b.weights
        centered = w2_exact(
            DiscreteMeasure(a.support - mean_a, a.weights),
            DiscreteMeasure(b.support - mean_b, b.weights),
        )[0]
        shifted_sq = w2_exact(DiscreteMeasure(a.support + shift, a.weights), b)[0] ** 2
        predicted = float(np.sum((mean_a + shift - mean_b) ** 2)) + centered**2
        if abs(shifted_sq - predicted) > 1e-9:
            return _result("transport.translation", start, False,
                           f"mean/centered split off by {abs(shifted_sq - predicted)}")
    return _result("transport.translation", start, True, f"{instances} instances")


def check_capacitated_oracle(instances=25, seed=5) -> PropertyResult:
    """Capacity-constrained assignment equals brute force over all balanced
    assignments at N=6, K=3, c=2."""
    start = time.perf_counter()
    rng = as_rng(seed)
    for t in range(instances):
        g = rng.child(t)
        pts = g.normal(size=(6, 2))
        centers = g.normal(size=(3, 2))
        _, cost = capacitated_assignment(pts, centers, 2)
        brute = math.inf
        for p in equal_partitions(6, 3):
            for assign_perm in permutations(range(3)):
                c = sum(
                    float(np.sum((pts[list(p[i])] - centers[assign_perm[i]]) ** 2))
                    for i in range(3)
                )
                brute = min(brute, c)
        if abs(cost - brute) > 1e-9:
            return _result("transport.capacitated_oracle", start, False,
                           f"cost {cost} vs brute {brute}")
    return _result("transport.capacitated_oracle", start, True, f"{instances} instances")


def check_barycenter_oracle(instances=20, k=3, c=3, d=2, seed=6, tol=1e-9) -> PropertyResult:
    """Multistart fixed point reaches the exhaustive optimum."""
    start = time.perf_counter()
    rng = as_rng(seed)
    misses = 0
    for t in range(instances):
        clouds = rng.child(t).normal(size=(k, c, d))
        exact = barycenter_exact_small(clouds)
        fixed = barycenter_multistart(clouds, rng=rng.child(1000 + t))
        if fixed.cost - exact.cost > tol:
            misses += 1
    return _result("barycenter.oracle", start, misses == 0,
                   f"{misses}/{instances} restarts stuck above the oracle cost")


def check_barycenter_identities(instances=20, seed=7) -> PropertyResult:
    """Variance reduction, fixed-point certificate, permutation equivariance."""
    start = time.perf_counter()
    rng = as_rng(seed)
    for t in range(instances):
        g = rng.child(t)
        k = int(g.integers(2, 5))
        c = int(g.integers(2, 5))
        clouds = g.normal(size=(k, c, 2))
        exact = barycenter_exact_small(clouds)
        pooled = clouds.reshape(-1, 2)
        mean_cost = exact.cost / k
        gap = abs(variance(pooled) - mean_cost - variance(exact.support))
        if gap > 1e-8:
            return _result("barycenter.identities", start, False,
                           f"variance reduction off by {gap}")
        fixed = barycenter_multistart(clouds, rng=g.child(1))
        recost = sum(match_uniform(fixed.support, clouds[p])[1] / c for p in range(k))
        if fixed.cost - recost > 1e-10:
            return _result("barycenter.identities", start, False,
                           "re-matching reduced a converged cost")
        perm = g.permutation(k)
        shuffled = barycenter_exact_small(clouds[perm])
        if abs(shuffled.cost - exact.cost) > 1e-10:
            return _result("barycenter.identities", start, False,
                           "cost changed under cluster reordering")
    return _result("barycenter.identities", start, True, f"{instances} instances")


def check_clustering_monotone(instances=20, seed=8) -> PropertyResult:
    """Per-iteration total within-cluster SSE is non-increasing and the
    output is balanced."""
    start = time.perf_counter()
    rng = as_rng(seed)
    for t in range(instances):
        g = rng.child(t)
        n = int(g.integers(2, 5)) * 4
        pts = g.normal(size=(n, 2))
        res = balanced_kmeans(pts, 4, restarts=3, rng=g.child(1))
        hist = np.asarray(res.sse_history)
        if np.any(np.diff(hist) > 1e-12 * np.maximum(hist[:-1], 1.0)):
            return _result("clustering.monotone", start, False, "SSE increased during Lloyd step")
        sizes = res.partition.sizes
        if sizes.max() - sizes.min() > (0 if n % 4 == 0 else 1):
            return _result("clustering.monotone", start, False, "unbalanced output")
        recomputed = sum(variance(pts[m]) for m in res.partition.groups())
        if abs(recomputed - res.objective) > 1e-10:
            return _result("clustering.monotone", start, False, "objective not recomputable")
    return _result("clustering.monotone", start, True, f"{instances} instances")


def check_clustering_oracle(instances=100, min_rate=0.95, restarts=20, seed=9) -> PropertyResult:
    """Balanced K-means with restarts matches the exhaustive optimum on at
    least min_rate of random small instances."""
    start = time.perf_counter()
    rng = as_rng(seed)
    hits = 0
    for t in range(instances):
        g = rng.child(t)
        k = int(g.integers(2, 5))
        size = int(g.integers(1, max(2, 8 // k) + 1))
        n = k * size
        d = int(g.integers(1, 3))
        pts = g.normal(size=(n, d))
        best, _, _, _ = min_variance_clustering(pts, k)
        res = balanced_kmeans(pts, k, restarts=restarts, rng=g.child(1))
        if res.objective <= best + 1e-9:
            hits += 1
    rate = hits / instances
    return _result("clustering.oracle", start, rate >= min_rate,
                   f"exact-optimum rate {rate:.2%} over {instances} instances")


def check_centroid_duality(instances=10, n=8, groups=4, seed=10) -> PropertyResult:
    """Within-group SSE plus the size-weighted centroid spread is the total
    SSE; maximizing one equals minimizing the other over all balanced
    partitions."""
    start = time.perf_counter()
    rng = as_rng(seed)
    for t in range(instances):
        pts = rng.child(t).normal(size=(n, 2))
        total = float(np.sum((pts - pts.mean(axis=0)) ** 2))
        grand = pts.mean(axis=0)
        sse_vals = []
        centroid_vals = []
        for p in equal_partitions(n, groups):
            sse = 0.0
            cvar = 0.0
            for members in p:
                sub = pts[list(members)]
                sse += float(np.sum((sub - sub.mean(axis=0)) ** 2))
                cvar += len(members) * float(np.sum((sub.mean(axis=0) - grand) ** 2))
            if abs(sse + cvar - total) > 1e-9:
                return _result("clustering.centroid_duality", start, False,
                               f"identity off by {abs(sse + cvar - total)}")
            sse_vals.append(sse)
            centroid_vals.append(cvar)
        arg_max = {i for i, v in enumerate(sse_vals) if v >= max(sse_vals) - 1e-9}
        arg_min = {i for i, v in enumerate(centroid_vals) if v <= min(centroid_vals) + 1e-9}
        if arg_max != arg_min:
            return _result("clustering.centroid_duality", start, False, "argmax sets differ")
    return _result("clustering.centroid_duality", start, True, f"{instances} instances")


def _expected_subgroup_variance(points, cluster_groups) -> float:
    """Mean over the full bijection family of the summed subgroup variance."""
    part = groups_to_partition(cluster_groups, points.shape[0])
    values = [
        sum(variance(points[m]) for m in q.groups()) for q in enumerate_QP(part)
    ]
    return float(np.mean(values))


def check_anticluster_duality(instances=6, n=8, k=4, seed=11) -> PropertyResult:
    """Balanced clustering optima coincide with the maximizers of the
    expected subgroup variance under uniform in-family selection."""
    start = time.perf_counter()
    rng = as_rng(seed)
    for t in range(instances):
        pts = rng.child(t).normal(size=(n, 2))
        parts = list(equal_partitions(n, k))
        clustering_vals = [sum_group_variances(pts, p) for p in parts]
        expected_vals = [_expected_subgroup_variance(pts, p) for p in parts]
        arg_min = {i for i, v in enumerate(clustering_vals) if v <= min(clustering_vals) + 1e-9}
        arg_max = {i for i, v in enumerate(expected_vals) if v >= max(expected_vals) - 1e-9}
        if arg_min != arg_max:
            return _result("clustering.anticluster_duality", start, False,
                           f"instance {t}: argmin/argmax sets differ")
    return _result("clustering.anticluster_duality", start, True, f"{instances} instances")


def check_clustering_duality(instances=6, n=8, subgroups=2, seed=12) -> PropertyResult:
    """Role-swapped duality: the expected cluster variance of in-family
    selections is an exactly decreasing affine function of the direct
    subgroup variance, so maximizers of one are minimizers of the other.
    """
    start = time.perf_counter()
    rng = as_rng(seed)
    for t in range(instances):
        pts = rng.child(t).normal(size=(n, 2))
        parts = list(equal_partitions(n, subgroups))
        direct = np.asarray([sum_group_variances(pts, p) for p in parts])
        expected = np.asarray([_expected_subgroup_variance(pts, p) for p in parts])
        arg_direct = {i for i, v in enumerate(direct) if v >= direct.max() - 1e-9}
        arg_expected = {i for i, v in enumerate(expected) if v <= expected.min() + 1e-9}
        if arg_direct != arg_expected:
            return _result("clustering.clustering_duality", start, False,
                           f"instance {t}: argmax/argmin sets differ")
        fit = np.polyfit(direct, expected, 1)
        residual = np.max(np.abs(np.polyval(fit, direct) - expected))
        if fit[0] >= 0 or residual > 1e-9:
            return _result("clustering.clustering_duality", start, False,
                           f"instance {t}: relation not decreasing affine (res {residual})")
    return _result("clustering.clustering_duality", start, True, f"{instances} instances")


def check_qp_structure(instances=10, seed=13) -> PropertyResult:
    """Every subgroup from the transport partitioners holds exactly one
    member of each cluster (divisible case)."""
    start = time.perf_counter()
    rng = as_rng(seed)
    for t in range(instances):
        g = rng.child(t)
        m = int(g.integers(2, 5))
        k = int(g.integers(2, 5))
        pts = g.normal(size=(m * k, 2))
        for builder in (whomp_random, whomp_matching):
            sub, clusters = builder(pts, m, rng=g.child(1), return_clusters=True)
            for members in sub.groups():
                seen = clusters.assignment[members]
                if len(set(seen.tolist())) != len(seen):
                    return _result("partitioners.qp_structure", start, False,
                                   f"{builder.__name__} duplicated a cluster in a subgroup")
    return _result("partitioners.qp_structure", start, True, f"{instances} instances")


def check_subgroup_barycenter_centroids(instances=20, samples=50, seed=14) -> PropertyResult:
    """For in-family selections from an exhaustively optimal clustering, the
    subgroup barycenter coincides with the cluster-centroid cloud."""
    start = time.perf_counter()
    rng = as_rng(seed)
    shapes = [(2, 2), (3, 2), (2, 3), (4, 2), (2, 4), (3, 3), (4, 3), (3, 4)]
    worst = 0.0
    for t in range(instances):
        g = rng.child(t)
        k, c = shapes[t % len(shapes)]
        pts = g.normal(size=(k * c, 2))
        _, optima, _, _ = min_variance_clustering(pts, k)
        cluster_part = groups_to_partition(optima[0], k * c)
        centroids = np.stack([pts[m].mean(axis=0) for m in cluster_part.groups()])
        sampler = QPSampler(cluster_part, c)
        for s in range(samples):
            q = sampler.sample(g.child(s))
            clouds = np.stack([pts[m] for m in q.groups()])
            bary = barycenter_exact_small(clouds)
            _, cost = match_uniform(bary.support, centroids)
            dist = math.sqrt(max(cost, 0.0) / centroids.shape[0])
            worst = max(worst, dist)
            if dist > 1e-8:
                return _result("partitioners.subgroup_barycenter", start, False,
                               f"instance {t}: W2 gap {dist}")
    return _result("partitioners.subgroup_barycenter", start, True,
                   f"{instances} instances x {samples} draws, worst gap {worst:.1e}")


def check_tradeoff_extremes(instances=10, seed=15) -> PropertyResult:
    """Over the fully enumerated bijection family at K=3, c=3: every member's
    subgroup-mean spread stays below the cluster-barycenter variance, and the
    matching partitioner attains that ceiling, the largest mean spread, and
    the smallest average subgroup variance."""
    start = time.perf_counter()
    rng = as_rng(seed)
    ring_pts, _, _, similar = triple_ring_instance()
    cases = [ring_pts] + [rng.child(t).normal(size=(9, 2)) for t in range(instances - 1)]
    for idx, pts in enumerate(cases):
        sub, clusters = whomp_matching(pts, 3, rng=rng.child(1000 + idx), return_clusters=True)
        grand = pts.mean(axis=0)

        def var_means(q):
            return float(np.mean([
                np.sum((pts[m].mean(axis=0) - grand) ** 2) for m in q.groups()
            ]))

        def mean_vars(q):
            return float(np.mean([variance(pts[m]) for m in q.groups()]))

        clouds = np.stack([pts[m] for m in clusters.groups()])
        ceiling = variance(barycenter_exact_small(clouds).support)
        family = list(enumerate_QP(clusters))
        vm = [var_means(q) for q in family]
        mv = [mean_vars(q) for q in family]
        if max(vm) > ceiling + 1e-8:
            return _result("partitioners.tradeoff_extremes", start, False,
                           f"case {idx}: mean spread exceeds the barycenter variance")
        if abs(var_means(sub) - ceiling) > 1e-8:
            return _result("partitioners.tradeoff_extremes", start, False,
                           f"case {idx}: matching misses the barycenter-variance ceiling")
        if var_means(sub) < max(vm) - 1e-9:
            return _result("partitioners.tradeoff_extremes", start, False,
                           f"case {idx}: mean-spread gap {max(vm) - var_means(sub)}")
        if mean_vars(sub) > min(mv) + 1e-9:
            return _result("partitioners.tradeoff_extremes", start, False,
                           f"case {idx}: avg-variance gap {mean_vars(sub) - min(mv)}")
        if idx == 0 and sub.key() != frozenset(frozenset(g) for g in similar):
            return _result("partitioners.tradeoff_extremes", start, False,
                           "ring instance: matching did not recover the similar triangles")
    return _result("partitioners.tradeoff_extremes", start, True, f"{len(cases)} cases")


def check_total_variance_identity(instances=12, seed=16) -> PropertyResult:
    """Sample variance splits exactly into mean spread plus average subgroup
    variance for every produced partition (equal subgroup sizes)."""
    start = time.perf_counter()
    rng = as_rng(seed)
    methods = ("random", "whomp_random", "whomp_matching", "covariate_adaptive", "anticluster")
    worst = 0.0
    for t in range(instances):
        g = rng.child(t)
        m = int(g.integers(2, 4))
        pts = g.normal(size=(m * int(g.integers(2, 5)), 3))
        for method in methods:
            part = make_partition(pts, method, m, rng=g.child(hash(method) % 1000))
            rep = homogeneity_report(pts, part)
            gap = abs(rep.total_var - rep.var_of_means - rep.mean_of_vars)
            worst = max(worst, gap)
            if gap > 1e-9:
                return _result("metrics.total_variance", start, False,
                               f"{method}: identity off by {gap}")
    return _result("metrics.total_variance", start, True,
                   f"{instances} instances x {len(methods)} methods, worst gap {worst:.1e}")


def check_whomp_oracle_optimality(instances=100, n=8, m=2, min_rate=0.95,
                                  restarts=32, seed=17) -> PropertyResult:
    """Objective of both transport partitioners equals the exhaustive
    minimum over all balanced partitions on at least min_rate of instances."""
    start = time.perf_counter()
    rng = as_rng(seed)
    hits = 0
    for t in range(instances):
        g = rng.child(t)
        pts = g.normal(size=(n, 2))
        best, _, _, _ = min_whomp_partition(pts, m)
        ok = True
        for builder in (whomp_random, whomp_matching):
            part = builder(pts, m, rng=g.child(1), restarts=restarts)
            value = whomp_objective(pts, tuple(tuple(x) for x in
                                               (mm.tolist() for mm in part.groups())))
            if value > best + 1e-9:
                ok = False
        hits += ok
    rate = hits / instances
    return _result("partitioners.oracle_optimality", start, rate >= min_rate,
                   f"exact-optimum rate {rate:.2%} over {instances} instances")


def check_characterization(instances=10, n=8, m=2, seed=18) -> PropertyResult:
    """On instances with a unique balanced clustering optimum: the bijection
    family attains the exhaustive homogeneity minimum, every minimizer lies
    inside the family, and all family members share the maximal subgroup-
    barycenter variance (equal to the cluster-centroid variance).

    Full argmin/family set equality fails on a small fraction of instances
    (some family members sit strictly above the minimum), so that rate is
    reported rather than asserted.
    """
    start = time.perf_counter()
    rng = as_rng(seed)
    used = 0
    skipped = 0
    equality = 0
    t = 0
    while used < instances and t < instances * 5:
        pts = rng.child(t).normal(size=(n, 2))
        t += 1
        k = n // m
        best, optima, _, values = min_variance_clustering(pts, k)
        if len(optima) != 1 or sorted(values)[1] - best < 1e-9:
            skipped += 1
            continue
        used += 1
        cluster_part = groups_to_partition(optima[0], n)
        family = {q.key() for q in enumerate_QP(cluster_part)}
        best_obj, _, parts, objs = min_whomp_partition(pts, m)
        keys = [groups_to_partition(p, n).key() for p in parts]
        minimizers = {k_ for k_, v in zip(keys, objs) if v <= best_obj + 1e-9}
        family_objs = [v for k_, v in zip(keys, objs) if k_ in family]
        if min(family_objs) > best_obj + 1e-9:
            return _result("partitioners.characterization", start, False,
                           "family does not attain the exhaustive minimum")
        if not minimizers <= family:
            return _result("partitioners.characterization", start, False,
                           "a partition outside the family attains the minimum")
        centroid_var = variance(
            np.stack([pts[g].mean(axis=0) for g in cluster_part.groups()])
        )
        bary_vars = []
        for p in parts:
            clouds = np.stack([pts[list(g)] for g in p])
            bary_vars.append(variance(barycenter_exact_small(clouds).support))
        family_vars = [v for k_, v in zip(keys, bary_vars) if k_ in family]
        if max(bary_vars) > centroid_var + 1e-9:
            return _result("partitioners.characterization", start, False,
                           "a subgroup barycenter exceeds the cluster-centroid variance")
        if any(abs(v - centroid_var) > 1e-9 for v in family_vars):
            return _result("partitioners.characterization", start, False,
                           "family member misses the barycenter-variance ceiling")
        equality += minimizers == family
    return _result(
        "partitioners.characterization", start, used >= instances,
        f"{used} unique-optimum instances ({skipped} skipped); "
        f"exact argmin/family equality on {equality}/{used}",
    )


def check_rerandomization(instances=20, n=8, m=2, seed=19) -> PropertyResult:
    """The accept rule 'subgroup-barycenter variance equals cluster-centroid
    variance' accepts exactly the bijection family of the unique clustering
    optimum."""
    start = time.perf_counter()
    rng = as_rng(seed)
    used = 0
    skipped = 0
    t = 0
    while used < instances and t < instances * 5:
        pts = rng.child(t).normal(size=(n, 2))
        t += 1
        k = n // m
        best, optima, _, values = min_variance_clustering(pts, k)
        if len(optima) != 1 or sorted(values)[1] - best < 1e-9:
            skipped += 1
            continue
        used += 1
        cluster_part = groups_to_partition(optima[0], n)
        centroid_var = variance(
            np.stack([pts[g].mean(axis=0) for g in cluster_part.groups()])
        )
        accepted = set()
        for groups_tuple in equal_partitions(n, m):
            clouds = np.stack([pts[list(g)] for g in groups_tuple])
            bary = barycenter_exact_small(clouds)
            if abs(variance(bary.support) - centroid_var) <= 1e-9:
                accepted.add(groups_to_partition(groups_tuple, n).key())
        family = {q.key() for q in enumerate_QP(cluster_part)}
        if accepted != family:
            return _result("partitioners.rerandomization", start, False,
                           f"accepted {len(accepted)} vs family {len(family)}")
    return _result("partitioners.rerandomization", start, used >= instances,
                   f"{used} unique-optimum instances verified, {skipped} skipped")


def check_subsample_bound(draws=500, n=12, k=4, seed=20) -> PropertyResult:
    """Squared W2 deviation of a with-replacement size-K subsample is at
    least the balanced-clustering optimum divided by K."""
    start = time.perf_counter()
    rng = as_rng(seed)
    pts = rng.child(0).normal(size=(n, 2))
    best, _, _, _ = min_variance_clustering(pts, k)
    floor = best / k
    full = DiscreteMeasure.uniform(pts)
    worst = math.inf
    g = rng.child(1)
    for _ in range(draws):
        pick = g.integers(0, n, size=k)
        _, plan = w2_exact(DiscreteMeasure.uniform(pts[pick]), full)
        worst = min(worst, plan.cost - floor)
        if plan.cost < floor - 1e-9:
            return _result("partitioners.subsample_bound", start, False,
                           f"bound violated by {floor - plan.cost}")
    return _result("partitioners.subsample_bound", start, True,
                   f"{draws} draws, smallest slack {worst:.3e}")


def check_ate_unbiased(draws=10_000, seed=21) -> PropertyResult:
    """Monte-Carlo mean of the estimator stays within 3 standard errors of
    the true effect under in-family resampling."""
    start = time.perf_counter()
    rng = as_rng(seed)
    pts, _ = gmm_sample(rng.child(0), n_per=(20, 20, 20))
    y0, y1, _ = linear_outcomes(pts, slope=(0.3, -0.2), intercepts=(1.0, 0.25))
    tau = float(y0.mean() - y1.mean())
    _, clusters = whomp_random(pts, 2, rng=rng.child(1), return_clusters=True)
    sampler = QPSampler(clusters, 2)
    stats = np.empty(draws)
    g = rng.child(2)
    for t in range(draws):
        part = sampler.sample(g.child(t))
        mask0 = part.assignment == 0
        stats[t] = y0[mask0].mean() - y1[~mask0].mean()
    se = stats.std(ddof=1) / math.sqrt(draws)
    gap = abs(stats.mean() - tau)
    return _result("metrics.ate_unbiased", start, gap <= 3 * se,
                   f"|mean - tau| = {gap:.2e} vs 3*SE = {3*se:.2e}")


def check_degenerate_null(draws=2000, seed=22) -> PropertyResult:
    """Duplicate-point clusters collapse the null distribution to zero."""
    start = time.perf_counter()
    rng = as_rng(seed)
    pts = duplicated_cluster_instance(rng.child(0), num_values=6, copies=2)
    sub, clusters = whomp_random(pts, 2, rng=rng.child(1), restarts=32, return_clusters=True)
    cluster_obj = sum(variance(pts[m]) for m in clusters.groups())
    if cluster_obj > 1e-12:
        return _result("metrics.degenerate_null", start, False,
                       f"clustering missed the duplicate groups (objective {cluster_obj})")
    y = pts @ np.array([0.7, -0.4])
    sampler = QPSampler(clusters, 2)
    result = ate_randomization_test(y, sub, sampler, draws=draws, rng=rng.child(2))
    worst = float(np.max(np.abs(result.null_distribution)))
    return _result("metrics.degenerate_null", start, worst <= 1e-12,
                   f"max |null draw| = {worst:.2e}, p-value {result.p_value:.3f}")


def check_ate_variance_bound(instances=20, draws=10_000, n=12, seed=23) -> PropertyResult:
    """Monte-Carlo estimator error second moment stays below the transport
    bound (5% Monte-Carlo allowance)."""
    start = time.perf_counter()
    rng = as_rng(seed)
    for t in range(instances):
        g = rng.child(t)
        pts = 3.0 * g.normal(size=(n, 2))
        y0, y1, lip = linear_outcomes(pts, slope=(0.8, -0.6), intercepts=(0.0, 0.5))
        _, clusters = whomp_random(pts, 2, rng=g.child(1), restarts=16, return_clusters=True)
        sampler = QPSampler(clusters, 2)
        res = ate_variance_bound_check(pts, y0, y1, lip, sampler, draws=draws, rng=g.child(2))
        if res.empirical > res.bound * 1.05:
            return _result("metrics.ate_variance_bound", start, False,
                           f"instance {t}: {res.empirical} > 1.05 * {res.bound}")
    return _result("metrics.ate_variance_bound", start, True,
                   f"{instances} instances x {draws} draws")


def check_metrics_variance_reduction(instances=10, n=8, m=2, seed=24) -> PropertyResult:
    """Relations between the homogeneity objective and the subgroup
    barycenter, for family partitions of an exhaustively optimal clustering:

    - summed squared distances to the barycenter equal m times the variance
      drop var(X) - var(barycenter), exactly;
    - the homogeneity objective is bounded above by 2m times that drop,
      with equality on most instances (the mixture coupling is usually but
      not always optimal, so the equality rate is reported, not asserted).
    """
    start = time.perf_counter()
    rng = as_rng(seed)
    used = 0
    tight = 0
    t = 0
    while used < instances and t < instances * 5:
        pts = rng.child(t).normal(size=(n, 2))
        t += 1
        best, optima, _, _ = min_variance_clustering(pts, n // m)
        sub, clusters = whomp_random(pts, m, rng=rng.child(1000 + t), restarts=32,
                                     return_clusters=True)
        cluster_groups = tuple(tuple(g.tolist()) for g in clusters.groups())
        if sum_group_variances(pts, cluster_groups) > best + 1e-9:
            continue
        used += 1
        rep = homogeneity_report(pts, sub)
        clouds = np.stack([pts[g] for g in sub.groups()])
        bary = barycenter_exact_small(clouds)
        drop = variance(pts) - variance(bary.support)
        to_bary = sum(
            w2_exact(DiscreteMeasure.uniform(pts[g]),
                     DiscreteMeasure.uniform(bary.support))[1].cost
            for g in sub.groups()
        )
        if abs(to_bary - m * drop) > 1e-8:
            return _result("metrics.variance_reduction", start, False,
                           f"barycenter identity off by {abs(to_bary - m * drop)}")
        if rep.sum_w2_sq > 2 * m * drop + 1e-9:
            return _result("metrics.variance_reduction", start, False,
                           f"objective exceeds the 2m bound by {rep.sum_w2_sq - 2*m*drop}")
        tight += abs(rep.sum_w2_sq - 2 * m * drop) <= 1e-7
    return _result("metrics.variance_reduction", start, used >= instances,
                   f"{used} instances; 2m bound tight on {tight}/{used}")


def check_entropy_and_pvalue(seed=25) -> PropertyResult:
    """Entropy bounds and relabel invariance; p-value range, shift
    invariance, and sign flip under group swap."""
    start = time.perf_counter()
    rng = as_rng(seed)
    labels = rng.integers(0, 4, size=24)
    part = Partition(np.arange(24) % 3, 3)
    ent = normalized_entropy(labels, part, 4)
    if np.any(ent < 0) or np.any(ent > 1):
        return _result("metrics.entropy_pvalue", start, False, "entropy out of [0, 1]")
    relabel = np.array([2, 3, 0, 1])[labels]
    if np.max(np.abs(normalized_entropy(relabel, part, 4) - ent)) > 1e-12:
        return _result("metrics.entropy_pvalue", start, False, "relabeling changed entropy")
    uniform_part = Partition(np.repeat([0, 1], 4), 2)
    flat = normalized_entropy(np.tile([0, 1, 2, 3], 2), uniform_part, 4)
    if np.max(np.abs(flat - 1.0)) > 1e-12:
        return _result("metrics.entropy_pvalue", start, False, "uniform counts not at entropy 1")
    single = normalized_entropy(np.zeros(8, dtype=int), uniform_part, 4)
    if np.max(np.abs(single)) > 1e-12:
        return _result("metrics.entropy_pvalue", start, False, "single class not at entropy 0")

    pts = rng.normal(size=(12, 2))
    y = pts @ np.array([1.0, 0.5]) + rng.normal(size=12)
    observed = Partition(np.arange(12) % 2, 2)
    sampler = RandomSplitSampler(12, 2)
    res = ate_randomization_test(y, observed, sampler, draws=400, rng=rng.child(1))
    if not 0 < res.p_value <= 1:
        return _result("metrics.entropy_pvalue", start, False, "p-value out of (0, 1]")
    shifted = ate_randomization_test(y + 17.5, observed, sampler, draws=400, rng=rng.child(1))
    if abs(shifted.p_value - res.p_value) > 1e-12 or abs(shifted.tau_hat - res.tau_hat) > 1e-9:
        return _result("metrics.entropy_pvalue", start, False, "not shift invariant")
    swapped = Partition(1 - observed.assignment, 2)
    flip = ate_randomization_test(y, swapped, sampler, draws=10, rng=rng.child(2))
    if abs(flip.tau_hat + res.tau_hat) > 1e-12:
        return _result("metrics.entropy_pvalue", start, False, "estimator did not flip sign")
    return _result("metrics.entropy_pvalue", start, True, "all invariances hold")


def check_lipschitz_probes(instances=15, seed=26) -> PropertyResult:
    """Probe discrepancies never exceed the subgroup transport distance."""
    start = time.perf_counter()
    rng = as_rng(seed)
    for t in range(instances):
        g = rng.child(t)
        m = int(g.integers(2, 4))
        pts = g.normal(size=(m * int(g.integers(2, 5)), 2))
        part = make_partition(pts, "random", m, rng=g.child(1))
        rep = homogeneity_report(pts, part)
        disc = lipschitz_discrepancy(pts, part, probes=32, rng=g.child(2))
        if np.any(disc > rep.per_subgroup_w2 + 1e-9):
            return _result("metrics.lipschitz", start, False, "probe exceeded W2 bound")
    return _result("metrics.lipschitz", start, True, f"{instances} instances")


def check_graph_spectra(instances=12, seed=27) -> PropertyResult:
    """Spectrum trace identity, relabeling invariance, closed-form subgraph
    distances, eigenpair residuals, and the known small spectra."""
    start = time.perf_counter()
    rng = as_rng(seed)
    path3 = Graph(np.array([[0, 1, 0], [1, 0, 1], [0, 1, 0]], dtype=np.int8))
    if np.max(np.abs(laplacian_spectrum(path3) - np.array([0.0, 1.0, 3.0]))) > 1e-10:
        return _result("graphs.spectra", start, False, "3-node path spectrum wrong")
    complete = Graph((np.ones((5, 5)) - np.eye(5)).astype(np.int8))
    if np.max(np.abs(laplacian_spectrum(complete) - np.array([0, 5, 5, 5, 5.0]))) > 1e-10:
        return _result("graphs.spectra", start, False, "complete-graph spectrum wrong")
    empty = Graph(np.zeros((4, 4), dtype=np.int8))
    if np.max(np.abs(laplacian_spectrum(empty))) > 1e-12:
        return _result("graphs.spectra", start, False, "empty-graph spectrum wrong")
    for t in range(instances):
        g = rng.child(t)
        graph = sbm_generate((4, 5, 6), np.full((3, 3), 0.4) + 0.3 * np.eye(3), rng=g)
        spec = laplacian_spectrum(graph)
        if spec.min() < -1e-8:
            return _result("graphs.spectra", start, False, "negative eigenvalue")
        degrees = graph.adjacency.sum()
        if abs(spec.sum() - degrees) > 1e-8 * max(1, degrees):
            return _result("graphs.spectra", start, False, "trace identity broken")
        perm = g.permutation(graph.n)
        relabeled = Graph(graph.adjacency[np.ix_(perm, perm)])
        if np.max(np.abs(laplacian_spectrum(relabeled) - spec)) > 1e-8:
            return _result("graphs.spectra", start, False, "not relabel invariant")
        nodes = np.sort(g.choice(graph.n, size=6, replace=False))
        direct = subgraph_spectrum_w2(graph, nodes)
        sub = Graph(graph.adjacency[np.ix_(nodes, nodes)])
        lp = w2_exact(
            DiscreteMeasure.uniform(spec[:, None]),
            DiscreteMeasure.uniform(laplacian_spectrum(sub)[:, None]),
        )[0]
        if abs(direct - lp) > 1e-9:
            return _result("graphs.spectra", start, False, "1-D spectrum distance != LP")
        emb = spectral_embedding(graph, 2)
        lap = graph.laplacian()
        scale = max(1.0, float(np.max(np.abs(spec))))
        for j in range(emb.shape[1]):
            v = emb[:, j]
            lam = float(v @ lap @ v)
            if np.linalg.norm(lap @ v - lam * v) > 1e-8 * scale:
                return _result("graphs.spectra", start, False, "embedding residual too large")
    two_cliques = np.zeros((6, 6), dtype=np.int8)
    two_cliques[:3, :3] = 1 - np.eye(3, dtype=np.int8)
    two_cliques[3:, 3:] = 1 - np.eye(3, dtype=np.int8)
    emb = spectral_embedding(Graph(two_cliques), 1)[:, 0]
    if not (np.all(emb[:3] * emb[3:] < 0) and len(set(np.sign(emb[:3]).tolist())) == 1):
        return _result("graphs.spectra", start, False, "cliques not sign-separated")
    return _result("graphs.spectra", start, True, f"{instances} random graphs plus closed forms")


def check_figure_instance(seed=28) -> PropertyResult:
    """The three-ring instance: clustering finds the spokes, the exhaustive
    spread maximizer is the same-scale rings, the matching partitioner
    returns congruent cross-scale triangles, and the exchange heuristic
    reaches the exhaustive optimum."""
    start = time.perf_counter()
    pts, spokes, rings, similar = triple_ring_instance()
    canon = lambda gs: frozenset(frozenset(g) for g in gs)
    km = balanced_kmeans(pts, 3, restarts=16, rng=0)
    if km.partition.key() != canon(spokes):
        return _result("partitioners.figure_instance", start, False, "clustering missed the spokes")
    parts = list(equal_partitions(9, 3))
    sse = lambda gs: sum(
        float(np.sum((pts[list(g)] - pts[list(g)].mean(axis=0)) ** 2)) for g in gs
    )
    values = [sse(p) for p in parts]
    arg = [parts[i] for i, v in enumerate(values) if v >= max(values) - 1e-9]
    if len(arg) != 1 or canon(arg[0]) != canon(rings):
        return _result("partitioners.figure_instance", start, False,
                       "exhaustive spread maximizer is not the rings")
    grand = pts.mean(axis=0)
    cvar = lambda gs: float(np.mean([
        np.sum((pts[list(g)].mean(axis=0) - grand) ** 2) for g in gs
    ]))
    if not cvar(rings) < cvar(similar) - 1e-9:
        return _result("partitioners.figure_instance", start, False,
                       "ring centroid spread not below the cross-scale grouping")
    matched = whomp_matching(pts, 3, rng=0)
    if matched.key() != canon(similar):
        return _result("partitioners.figure_instance", start, False,
                       "matching did not produce the congruent triangles")
    group_vars = [variance(pts[m]) for m in matched.groups()]
    if max(group_vars) - min(group_vars) > 1e-9:
        return _result("partitioners.figure_instance", start, False,
                       "matching groups are not at a common scale")
    hit = False
    for s in range(20):
        part = anticluster_exchange(pts, 3, rng=s)
        value = sse(tuple(tuple(m.tolist()) for m in part.groups()))
        if value >= max(values) - 1e-9:
            hit = True
            break
    if not hit:
        return _result("partitioners.figure_instance", start, False,
                       "exchange heuristic never reached the exhaustive optimum")
    return _result("partitioners.figure_instance", start, True,
                   "spokes / rings / congruent triangles all verified")


def check_determinism(seed=29) -> PropertyResult:
    """Identical seeds reproduce identical partitions for every method."""
    start = time.perf_counter()
    rng = as_rng(seed)
    pts = rng.normal(size=(24, 2))
    for method in ("random", "whomp_random", "whomp_matching", "covariate_adaptive", "anticluster"):
        a = make_partition(pts, method, 3, rng=123)
        b = make_partition(pts, method, 3, rng=123)
        if not np.array_equal(a.assignment, b.assignment):
            return _result("core.determinism", start, False, f"{method} not reproducible")
    return _result("core.determinism", start, True, "all methods seed-stable")


CHECKS = {
    "transport.metric_axioms": check_metric_axioms,
    "transport.permutation_oracle": check_permutation_oracle,
    "transport.w2_1d": check_w2_1d_closed_form,
    "transport.plan_marginals": check_plan_marginals,
    "transport.translation": check_translation_covariance,
    "transport.capacitated_oracle": check_capacitated_oracle,
    "barycenter.oracle": check_barycenter_oracle,
    "barycenter.identities": check_barycenter_identities,
    "clustering.monotone": check_clustering_monotone,
    "clustering.oracle": check_clustering_oracle,
    "clustering.centroid_duality": check_centroid_duality,
    "clustering.anticluster_duality": check_anticluster_duality,
    "clustering.clustering_duality": check_clustering_duality,
    "partitioners.qp_structure": check_qp_structure,
    "partitioners.subgroup_barycenter": check_subgroup_barycenter_centroids,
    "partitioners.tradeoff_extremes": check_tradeoff_extremes,
    "partitioners.oracle_optimality": check_whomp_oracle_optimality,
    "partitioners.characterization": check_characterization,
    "partitioners.rerandomization": check_rerandomization,
    "partitioners.subsample_bound": check_subsample_bound,
    "partitioners.figure_instance": check_figure_instance,
    "metrics.total_variance": check_total_variance_identity,
    "metrics.ate_unbiased": check_ate_unbiased,
    "metrics.degenerate_null": check_degenerate_null,
    "metrics.ate_variance_bound": check_ate_variance_bound,
    "metrics.variance_reduction": check_metrics_variance_reduction,
    "metrics.entropy_pvalue": check_entropy_and_pvalue,
    "metrics.lipschitz": check_lipschitz_probes,
    "graphs.spectra": check_graph_spectra,
    "core.determinism": check_determinism,
}

# Faster parameterizations for the CLI self-test; anything not listed runs
# at its keyword defaults.
QUICK_OVERRIDES = {
    "transport.metric_axioms": {"instances": 40},
    "transport.permutation_oracle": {"instances": 20},
    "clustering.oracle": {"instances": 25},
    "partitioners.subgroup_barycenter": {"instances": 8, "samples": 12},
    "partitioners.oracle_optimality": {"instances": 20},
    "partitioners.characterization": {"instances": 4},
    "partitioners.rerandomization": {"instances": 5},
    "partitioners.subsample_bound": {"draws": 120},
    "metrics.ate_unbiased": {"draws": 2000},
    "metrics.ate_variance_bound": {"instances": 4, "draws": 2000},
    "metrics.variance_reduction": {"instances": 4},
    "graphs.spectra": {"instances": 4},
    "clustering.anticluster_duality": {"instances": 3},
    "clustering.clustering_duality": {"instances": 3},
}


def run_property_suite(scale: str = "default", inject_bug: bool = False,
                       names=None) -> list[PropertyResult]:
    """Run the named checks (all by default) and return their results.

    scale "quick" shrinks instance counts for CI; "default" uses each
    check's own defaults.  inject_bug corrupts the transport distance fed to
    the metric-axioms check (a negative control: the suite must fail).
    """
    selected = list(CHECKS) if names is None else list(names)
    results = []
    for name in selected:
        check = CHECKS[name]
        kwargs = {}
        if scale == "quick":
            kwargs.update(QUICK_OVERRIDES.get(name, {}))
        if inject_bug and name == "transport.metric_axioms":
            kwargs["w2_fn"] = lambda a, b: -w2_exact(a, b)[0]
        results.append(check(**kwargs))
    return results
