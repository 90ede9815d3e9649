"""Homogeneity diagnostics and randomization inference."""

import numpy as np
import pytest

from whomp.core import Partition, Rng
from whomp.metrics import (
    ate_randomization_test,
    ate_variance_bound_check,
    homogeneity_report,
    lipschitz_discrepancy,
    normalized_entropy,
)
from whomp.partitioners import QPSampler, RandomSplitSampler, whomp_random
from whomp.properties import (
    check_ate_unbiased,
    check_ate_variance_bound,
    check_degenerate_null,
    check_entropy_and_pvalue,
    check_lipschitz_probes,
    check_metrics_variance_reduction,
    check_total_variance_identity,
)
from whomp.synthetic import duplicated_cluster_instance


def test_report_four_point_line():
    # X = {0,1,2,3}, subgroups {0,3} and {1,2}; distances from the
    # quantile-coupling oracle: W2^2 = 0.5 for each subgroup.
    pts = np.array([[0.0], [1.0], [2.0], [3.0]])
    part = Partition([0, 1, 1, 0], 2)
    rep = homogeneity_report(pts, part)
    assert np.allclose(rep.per_subgroup_w2**2, [0.5, 0.5], atol=1e-12)
    assert abs(rep.sum_w2_sq - 1.0) < 1e-12
    assert abs(rep.var_of_means) < 1e-12
    assert abs(rep.mean_of_vars - 1.25) < 1e-12
    assert abs(rep.total_var - 1.25) < 1e-12
    assert abs(rep.var_of_vars - 1.0) < 1e-12  # variances 2.25 and 0.25


def test_report_duplicated_dataset_zero_distances():
    pts = duplicated_cluster_instance(Rng(0), num_values=3, copies=3)
    # rows are value-major (v0,v0,v0,v1,...): tiling group labels puts one
    # copy of every distinct point into each subgroup
    part = Partition(np.tile([0, 1, 2], 3), 3)
    rep = homogeneity_report(pts, part)
    assert np.max(rep.per_subgroup_w2) < 1e-12


def test_report_single_group():
    pts = np.random.default_rng(1).normal(size=(6, 2))
    rep = homogeneity_report(pts, Partition(np.zeros(6, dtype=int), 1))
    assert rep.per_subgroup_w2[0] < 1e-10
    assert rep.var_of_means < 1e-18
    assert abs(rep.mean_of_vars - rep.total_var) < 1e-12


def test_ate_constant_outcomes():
    outcomes = np.full(8, 3.25)
    observed = Partition(np.arange(8) % 2, 2)
    res = ate_randomization_test(outcomes, observed, RandomSplitSampler(8, 2), 200, rng=0)
    assert res.tau_hat == 0.0
    assert np.max(np.abs(res.null_distribution)) == 0.0
    assert res.p_value == 1.0


def test_ate_requires_two_groups():
    with pytest.raises(ValueError, match="2 subgroups"):
        ate_randomization_test(np.ones(6), Partition(np.arange(6) % 3, 3),
                               RandomSplitSampler(6, 3), 10)


def test_ate_pvalue_range_small_signal():
    rng = np.random.default_rng(2)
    outcomes = rng.normal(size=10)
    observed = Partition(np.arange(10) % 2, 2)
    res = ate_randomization_test(outcomes, observed, RandomSplitSampler(10, 2), 99, rng=1)
    assert 0 < res.p_value <= 1
    assert res.draws == 99


def test_lipschitz_exact_copy_and_single_point():
    pts = duplicated_cluster_instance(Rng(3), num_values=4, copies=2)
    part = Partition(np.tile([0, 1], 4), 2)
    disc = lipschitz_discrepancy(pts, part, probes=16, rng=0)
    assert np.max(disc) < 1e-12

    two = np.array([[0.0, 0.0], [3.0, 4.0]])
    part2 = Partition(np.array([0, 1]), 2)
    disc2 = lipschitz_discrepancy(two, part2, probes=64, rng=0)
    # anchors are data rows; |mean h(X) - h(x_q)| = r/2 with r = 5
    assert np.allclose(disc2, 2.5, atol=1e-12)


def test_entropy_examples():
    labels = np.array([0, 1, 2, 3, 0, 0, 0, 0])
    part = Partition(np.repeat([0, 1], 4), 2)
    ent = normalized_entropy(labels, part, 4)
    assert abs(ent[0] - 1.0) < 1e-12
    assert ent[1] == 0.0
    labels10 = np.array([0, 0, 1, 1])
    ent10 = normalized_entropy(labels10, Partition(np.zeros(4, dtype=int), 1), 10)
    assert abs(ent10[0] - np.log(2) / np.log(10)) < 1e-12
    with pytest.raises(ValueError, match="labels"):
        normalized_entropy(np.array([0, 7]), Partition(np.array([0, 1]), 2), 4)


def test_variance_bound_degenerate_cases():
    pts = duplicated_cluster_instance(Rng(4), num_values=5, copies=2)
    _, clusters = whomp_random(pts, 2, rng=0, restarts=32, return_clusters=True)
    sampler = QPSampler(clusters, 2)
    res = ate_variance_bound_check(pts, np.ones(10), np.ones(10), 0.0, sampler, 200, rng=1)
    assert res.empirical == 0.0 and res.bound == 0.0
    y = pts @ np.array([1.0, -2.0])
    res2 = ate_variance_bound_check(pts, y, y + 1.0, np.sqrt(5.0), sampler, 200, rng=2)
    assert res2.empirical < 1e-20
    assert res2.bound < 1e-12


@pytest.mark.parametrize("check,kwargs", [
    (check_total_variance_identity, {"instances": 8}),
    (check_ate_unbiased, {"draws": 3000}),
    (check_degenerate_null, {"draws": 500}),
    (check_ate_variance_bound, {"instances": 4, "draws": 3000}),
    (check_metrics_variance_reduction, {"instances": 5}),
    (check_entropy_and_pvalue, {}),
    (check_lipschitz_probes, {"instances": 8}),
])
def test_property_checks(check, kwargs):
    result = check(**kwargs)
    assert result.passed, result.detail
