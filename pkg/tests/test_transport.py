"""Exact transport: distances, plans, matchings, closed forms."""

from itertools import permutations

import numpy as np
import pytest

from whomp.core import Rng
from whomp.exhaustive import equal_partitions
from whomp.properties import (
    check_capacitated_oracle,
    check_metric_axioms,
    check_permutation_oracle,
    check_plan_marginals,
    check_translation_covariance,
    check_w2_1d_closed_form,
)
from whomp.transport import (
    DiscreteMeasure,
    capacitated_assignment,
    match_uniform,
    w2_1d,
    w2_exact,
)


def uniform(points):
    return DiscreteMeasure.uniform(np.asarray(points, dtype=float))


def test_identity_distance_zero():
    m = uniform(np.random.default_rng(0).normal(size=(5, 3)))
    dist, plan = w2_exact(m, m)
    assert dist <= 1e-10
    assert plan.cost <= 1e-12


def test_single_atom_distance():
    dist, _ = w2_exact(uniform([[0.0, 0.0]]), uniform([[3.0, 4.0]]))
    assert abs(dist - 5.0) < 1e-12


def test_four_point_uniform_matches_permutation_minimum():
    rng = np.random.default_rng(1)
    for _ in range(10):
        a = rng.normal(size=(4, 2))
        b = rng.normal(size=(4, 2))
        _, plan = w2_exact(uniform(a), uniform(b))
        brute = min(
            sum(float(np.sum((a[i] - b[p[i]]) ** 2)) for i in range(4))
            for p in permutations(range(4))
        )
        assert abs(plan.cost - brute / 4) < 1e-10


def test_match_uniform_examples():
    pts = np.random.default_rng(2).normal(size=(6, 2))
    sigma, cost = match_uniform(pts, pts)
    assert abs(cost) < 1e-12
    assert sorted(sigma.tolist()) == list(range(6))
    sigma, cost = match_uniform(np.array([0.0, 1.0]), np.array([1.0, 0.0]))
    assert cost == 0.0
    assert sigma.tolist() == [1, 0]
    with pytest.raises(ValueError, match="counts"):
        match_uniform(np.ones((3, 2)), np.ones((4, 2)))


def test_match_uniform_brute_force_six_points():
    rng = np.random.default_rng(3)
    for _ in range(5):
        a = rng.normal(size=(6, 3))
        b = rng.normal(size=(6, 3))
        _, cost = match_uniform(a, b)
        brute = min(
            sum(float(np.sum((a[i] - b[p[i]]) ** 2)) for i in range(6))
            for p in permutations(range(6))
        )
        assert abs(cost - brute) < 1e-9


def test_w2_1d_examples():
    assert w2_1d(uniform([0.0, 1.0]), uniform([0.0, 1.0])) == 0.0
    assert abs(w2_1d(uniform([0.0, 2.0]), uniform([1.0, 3.0])) - 1.0) < 1e-12
    rng = np.random.default_rng(4)
    for _ in range(10):
        a = uniform(rng.normal(size=5))
        b = uniform(rng.normal(size=7))
        assert abs(w2_1d(a, b) - w2_exact(a, b)[0]) < 1e-10
    with pytest.raises(ValueError, match="one-dimensional"):
        w2_1d(uniform(np.ones((2, 2))), uniform(np.ones((2, 2))))


def test_dimension_mismatch_rejected():
    with pytest.raises(ValueError, match="dimension"):
        w2_exact(uniform(np.ones((2, 2))), uniform(np.ones((2, 3))))


def test_measure_validation():
    with pytest.raises(ValueError, match="sum"):
        DiscreteMeasure(np.ones((2, 1)), np.array([0.6, 0.6]))
    with pytest.raises(ValueError, match="nonnegative"):
        DiscreteMeasure(np.ones((2, 1)), np.array([1.5, -0.5]))
    with pytest.raises(ValueError, match="finite"):
        DiscreteMeasure(np.array([[np.nan]]), np.array([1.0]))


def test_capacitated_identity_and_cluster_recovery():
    pts = np.array([[0.0, 0.0], [1.0, 0.0], [5.0, 5.0], [6.0, 5.0]])
    assign, cost = capacitated_assignment(pts, pts, 1)
    assert np.array_equal(assign, [0, 1, 2, 3]) and cost < 1e-12

    centers = np.array([[0.5, 0.0], [5.5, 5.0]])
    assign, cost = capacitated_assignment(pts, centers, 2)
    assert assign.tolist() == [0, 0, 1, 1]
    # oracle: best over the 3 balanced bipartitions
    brute = min(
        sum(float(np.sum((pts[list(g)] - centers[i]) ** 2))
            for i, g in enumerate(p))
        for base in equal_partitions(4, 2)
        for p in (base, base[::-1])
    )
    assert abs(cost - brute) < 1e-12


def test_capacitated_capacity_validation():
    with pytest.raises(ValueError, match="capacities sum"):
        capacitated_assignment(np.ones((4, 1)), np.ones((2, 1)), 3)


def test_plan_cost_consistent_with_entries():
    rng = np.random.default_rng(5)
    a = uniform(rng.normal(size=(6, 2)))
    b = uniform(rng.normal(size=(9, 2)))
    dist, plan = w2_exact(a, b)
    recomputed = float(np.sum(
        plan.mass * np.sum(
            (a.support[plan.source_index] - b.support[plan.target_index]) ** 2, axis=1)
    ))
    assert abs(plan.cost - recomputed) < 1e-12
    assert abs(dist - np.sqrt(plan.cost)) < 1e-15


@pytest.mark.parametrize("check,kwargs", [
    (check_metric_axioms, {"instances": 60}),
    (check_permutation_oracle, {"instances": 25}),
    (check_w2_1d_closed_form, {"instances": 40}),
    (check_plan_marginals, {"instances": 40}),
    (check_translation_covariance, {"instances": 20}),
    (check_capacitated_oracle, {"instances": 10}),
])
def test_property_checks(check, kwargs):
    result = check(**kwargs)
    assert result.passed, result.detail


def test_w2_1d_zero_weight_atoms():
    a = DiscreteMeasure(np.array([[0.0], [1.0], [2.0]]), np.array([0.5, 0.0, 0.5]))
    b = DiscreteMeasure(np.array([[0.0], [2.0]]), np.array([0.5, 0.5]))
    assert abs(w2_1d(a, b)) < 1e-12
    assert abs(w2_1d(a, b) - w2_exact(a, b)[0]) < 1e-10
