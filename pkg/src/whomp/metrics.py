"""Diagnostics for subgroup partitions and randomization inference."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import Partition, as_points, as_rng, partition_validate, variance
from .transport import DiscreteMeasure, w2_exact


@dataclass(frozen=True)
class HomogeneityReport:
    """Per-subgroup transport distances to the sample plus moment spreads.

    var_of_means is the unweighted spread of subgroup means around the sample
    mean; mean_of_vars averages the within-subgroup variances; var_of_vars is
    the variance across subgroups of the scalar within-subgroup variance
    (the "second-moment" spread reported by the experiment tables).
    """

    per_subgroup_w2: np.ndarray
    mean_w2: float
    sum_w2_sq: float
    var_of_means: float
    mean_of_vars: float
    var_of_vars: float
    total_var: float

    def to_dict(self) -> dict:
        return {
            "per_subgroup_w2": [float(x) for x in self.per_subgroup_w2],
            "mean_w2": self.mean_w2,
            "sum_w2_sq": self.sum_w2_sq,
            "var_of_means": self.var_of_means,
            "mean_of_vars": self.mean_of_vars,
            "var_of_vars": self.var_of_vars,
            "total_var": self.total_var,
        }


def homogeneity_report(data, part: Partition) -> HomogeneityReport:
    """Exact W2 of every subgroup to the full sample plus moment diagnostics."""
    points = as_points(data)
    partition_validate(part, points.shape[0], balanced=False)
    full = DiscreteMeasure.uniform(points)
    grand_mean = points.mean(axis=0)
    distances = []
    means = []
    variances = []
    for members in part.groups():
        sub = points[members]
        dist, _ = w2_exact(DiscreteMeasure.uniform(sub), full)
        distances.append(dist)
        means.append(sub.mean(axis=0))
        variances.append(variance(sub))
    distances = np.asarray(distances)
    means = np.asarray(means)
    variances = np.asarray(variances)
    return HomogeneityReport(
        per_subgroup_w2=distances,
        mean_w2=float(distances.mean()),
        sum_w2_sq=float(np.sum(distances**2)),
        var_of_means=float(np.mean(np.sum((means - grand_mean) ** 2, axis=1))),
        mean_of_vars=float(variances.mean()),
        var_of_vars=float(np.mean((variances - variances.mean()) ** 2)),
        total_var=variance(points),
    )


@dataclass(frozen=True)
class AteTestResult:
    tau_hat: float
    null_distribution: np.ndarray
    p_value: float
    draws: int


def _group_mean_difference(outcomes: np.ndarray, part: Partition) -> float:
    g0 = outcomes[part.assignment == 0]
    g1 = outcomes[part.assignment == 1]
    return float(g0.mean() - g1.mean())


def ate_randomization_test(outcomes, observed: Partition, sampler, draws: int, rng=0) -> AteTestResult:
    """Two-group randomization test of the mean-difference estimator.

    The observed statistic is mean(group 0) - mean(group 1).  The null
    distribution re-draws the split from the sampler and recomputes the same
    difference on the unchanged outcomes; the p-value uses the add-one
    convention (#{|null| >= |observed|} + 1) / (draws + 1).
    """
    outcomes = np.asarray(outcomes, dtype=np.float64)
    if not np.all(np.isfinite(outcomes)):
        raise ValueError("outcomes must be finite")
    if observed.num_groups != 2:
        raise ValueError("the test is defined for exactly 2 subgroups")
    partition_validate(observed, len(outcomes), balanced=False)
    rng = as_rng(rng)
    tau_hat = _group_mean_difference(outcomes, observed)
    null = np.empty(draws)
    for t in range(draws):
        null[t] = _group_mean_difference(outcomes, sampler.sample(rng.child(t)))
    exceed = int(np.sum(np.abs(null) >= abs(tau_hat)))
    return AteTestResult(tau_hat, null, (exceed + 1) / (draws + 1), draws)


def lipschitz_discrepancy(data, part: Partition, probes: int, rng=0) -> np.ndarray:
    """Per-subgroup worst gap between sample and subgroup means of random
    distance probes.

    Probe functions are x -> ||x - a|| for anchors a drawn from the data
    rows; each probe is 1-Lipschitz, so every reported gap is bounded by the
    subgroup's W1 (hence W2) distance to the sample.
    """
    if probes < 1:
        raise ValueError("need at least one probe")
    points = as_points(data)
    rng = as_rng(rng)
    anchors = points[rng.choice(points.shape[0], size=probes, replace=True)]
    # probe_values[i, t] = ||x_i - anchor_t||
    diff = points[:, None, :] - anchors[None, :, :]
    probe_values = np.sqrt(np.sum(diff * diff, axis=2))
    full_means = probe_values.mean(axis=0)
    out = np.empty(part.num_groups)
    for g, members in enumerate(part.groups()):
        sub_means = probe_values[members].mean(axis=0)
        out[g] = float(np.max(np.abs(full_means - sub_means)))
    return out


def normalized_entropy(labels, part: Partition, num_classes: int) -> np.ndarray:
    """Per-subgroup entropy of class frequencies, normalized to [0, 1]."""
    labels = np.asarray(labels, dtype=np.int64)
    if labels.min() < 0 or labels.max() >= num_classes:
        raise ValueError(
            f"labels must lie in [0, {num_classes}), got range "
            f"[{labels.min()}, {labels.max()}]"
        )
    out = np.empty(part.num_groups)
    for g, members in enumerate(part.groups()):
        freq = np.bincount(labels[members], minlength=num_classes) / len(members)
        nz = freq[freq > 0]
        entropy = float(-np.sum(nz * np.log(nz)))
        out[g] = entropy / np.log(num_classes) if num_classes > 1 else 0.0
    return out


@dataclass(frozen=True)
class VarianceBoundResult:
    empirical: float
    bound: float
    tau: np.ndarray
    draws: int


def ate_variance_bound_check(
    data,
    outcomes_control,
    outcomes_treated,
    lipschitz: float,
    sampler,
    draws: int,
    rng=0,
    bound_samples: int = 32,
) -> VarianceBoundResult:
    """Monte-Carlo second moment of the estimator error against the
    transport bound.

    outcomes_control/treated are the potential outcomes of every unit under
    each arm (scalar or vector per unit); lipschitz bounds the outcome map's
    sensitivity to the covariates.  sampler is either a two-arm split
    sampler or a cluster Partition (splits are then drawn from its
    one-member-per-cluster family).  The bound is
    L^2 * m/(m-1) * sum_q W2^2(X_q, X) with m = 2 arms, evaluated at the
    minimum over sampled splits (the claim holds for every split the sampler
    produces).
    """
    points = as_points(data)
    if isinstance(sampler, Partition):
        from .partitioners import QPSampler

        sampler = QPSampler(sampler, 2)
    y0 = np.asarray(outcomes_control, dtype=np.float64)
    y1 = np.asarray(outcomes_treated, dtype=np.float64)
    if y0.ndim == 1:
        y0 = y0[:, None]
    if y1.ndim == 1:
        y1 = y1[:, None]
    rng = as_rng(rng)
    tau = y0.mean(axis=0) - y1.mean(axis=0)
    errors = np.empty(draws)
    full = DiscreteMeasure.uniform(points)
    bound_sum = np.inf
    for t in range(draws):
        part = sampler.sample(rng.child(t))
        mask0 = part.assignment == 0
        tau_hat = y0[mask0].mean(axis=0) - y1[~mask0].mean(axis=0)
        errors[t] = float(np.sum((tau_hat - tau) ** 2))
        if t < bound_samples:
            total = 0.0
            for members in part.groups():
                _, plan = w2_exact(DiscreteMeasure.uniform(points[members]), full)
                total += plan.cost
            bound_sum = min(bound_sum, total)
    bound = lipschitz**2 * 2.0 * bound_sum
    return VarianceBoundResult(float(errors.mean()), float(bound), tau, draws)
