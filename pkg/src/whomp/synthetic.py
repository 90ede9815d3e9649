"""Synthetic instance generators used by the experiments and theory checks."""

from __future__ import annotations

import numpy as np

from .core import as_rng

GMM_MEANS = ((0.0, 10.0), (-10.0, -5.0), (10.0, -5.0))


def gmm_sample(rng, n_per=(20, 20, 20), means=GMM_MEANS, cov_scale=3.0):
    """Draw a Gaussian-mixture sample: n_per[i] points from an isotropic
    Gaussian at means[i] with covariance cov_scale * I.

    Returns (points, labels) with labels the component index per row.
    """
    rng = as_rng(rng)
    std = float(np.sqrt(cov_scale))
    blocks = []
    labels = []
    for i, (count, mean) in enumerate(zip(n_per, means)):
        blocks.append(np.asarray(mean) + std * rng.normal(size=(count, len(mean))))
        labels.extend([i] * count)
    return np.concatenate(blocks, axis=0), np.asarray(labels, dtype=np.int64)


def duplicated_cluster_instance(rng, num_values: int, copies: int, dim: int = 2, spread: float = 5.0):
    """num_values distinct points, each repeated `copies` times.

    The balanced clustering optimum is the duplicate groups (objective 0), so
    every subgroup selection yields identical empirical distributions.
    """
    rng = as_rng(rng)
    base = spread * rng.normal(size=(num_values, dim))
    return np.repeat(base, copies, axis=0)


def triple_ring_instance():
    """Nine points on three concentric triangles (radii 1, 1.2, 1.4).

    Spokes (three angularly tight triples) are the unique balanced 3-means
    optimum.  Each ring is exactly symmetric, so grouping by ring zeroes the
    group-centroid spread: that is the unique total-spread maximizer, and its
    groups are triangles at three different scales.  Grouping one point per
    ring instead gives three congruent triangles (equal group variances) and
    is the in-family partition with the largest spread of group means.

    Returns (points, spokes, rings, similar) as index-tuple partitions.
    """
    radii = np.array([1.0, 1.2, 1.4])
    psi = np.deg2rad(np.array([0.0, 120.0, 240.0]))
    theta = np.deg2rad(np.array([0.0, 14.0, -9.0]))
    pts = np.zeros((9, 2))
    for a in range(3):
        for k in range(3):
            ang = psi[a] + theta[k]
            pts[3 * a + k] = radii[k] * np.array([np.cos(ang), np.sin(ang)])
    spokes = ((0, 1, 2), (3, 4, 5), (6, 7, 8))
    rings = ((0, 3, 6), (1, 4, 7), (2, 5, 8))
    similar = ((0, 4, 8), (1, 5, 6), (2, 3, 7))
    return pts, spokes, rings, similar


def linear_outcomes(points, slope, intercepts=(0.0, 0.0)):
    """Potential outcomes y_arm = slope . x + intercepts[arm] for both arms.

    Returns (y0, y1, lipschitz) with the Lipschitz constant ||slope||.
    """
    slope = np.asarray(slope, dtype=np.float64)
    base = points @ slope
    return (
        base + intercepts[0],
        base + intercepts[1],
        float(np.linalg.norm(slope)),
    )
