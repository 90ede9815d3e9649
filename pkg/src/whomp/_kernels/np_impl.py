"""Vectorized NumPy implementations of the hot numeric kernels.

These are the fallback used when the JIT backend is disabled or numba is
unavailable.  Both backends must agree to floating-point noise; the kernel
agreement test enforces this.
"""

import numpy as np

# Broadcasting an (n, m, d) difference tensor is the most accurate way to get
# squared distances (no cancellation), but it costs n*m*d memory.  Above this
# element budget we switch to the dot-product identity.
_BROADCAST_BUDGET = 4_000_000


def pairwise_sqdist(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Matrix of squared Euclidean distances between rows of a and b."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    n, m, d = a.shape[0], b.shape[0], a.shape[1]
    if n * m * d <= _BROADCAST_BUDGET:
        diff = a[:, None, :] - b[None, :, :]
        return np.einsum("ijk,ijk->ij", diff, diff)
    sq = (a * a).sum(axis=1)[:, None] + (b * b).sum(axis=1)[None, :]
    out = sq - 2.0 * (a @ b.T)
    np.maximum(out, 0.0, out=out)
    return out


def w2_1d_sqcost(xs, xw, ys, yw) -> float:
    """Squared transport cost between two sorted weighted point sets on the line.

    Implements the quantile coupling: walk the merged cumulative-weight grid
    and accumulate squared differences of the matched quantile values.
    Supports must be ascending and each weight vector must sum to 1.
    """
    cx = np.cumsum(xw)
    cy = np.cumsum(yw)
    grid = np.union1d(cx, cy)
    prev = np.concatenate(([0.0], grid[:-1]))
    seg = grid - prev
    ix = np.minimum(np.searchsorted(cx, prev, side="right"), len(xs) - 1)
    iy = np.minimum(np.searchsorted(cy, prev, side="right"), len(ys) - 1)
    diff = xs[ix] - ys[iy]
    return float(np.sum(seg * diff * diff))


def jacobi_eigh(a_in: np.ndarray, rel_tol: float = 1e-12, max_sweeps: int = 100):
    """Eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.

    Sweeps until the off-diagonal Frobenius mass drops below rel_tol times
    the Frobenius norm of the input.  Returns (eigenvalues ascending,
    eigenvectors as columns in the same order).
    """
    a = np.array(a_in, dtype=np.float64, copy=True)
    n = a.shape[0]
    v = np.eye(n)
    if n == 1:
        return a.diagonal().copy(), v
    norm = float(np.linalg.norm(a))
    if norm == 0.0:
        return np.zeros(n), v
    thresh = rel_tol * norm
    skip = thresh / (2.0 * n)
    for _ in range(max_sweeps):
        off_sq = 2.0 * float(np.sum(np.triu(a, 1) ** 2))
        if off_sq <= thresh * thresh:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if abs(apq) <= skip:
                    continue
                app, aqq = a[p, p], a[q, q]
                theta = (aqq - app) / (2.0 * apq)
                if abs(theta) > 1e150:
                    t = 1.0 / (2.0 * theta)
                elif theta == 0.0:
                    t = 1.0
                else:
                    t = np.sign(theta) / (abs(theta) + np.hypot(theta, 1.0))
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                ap = a[:, p].copy()
                aq = a[:, q].copy()
                a[:, p] = c * ap - s * aq
                a[:, q] = s * ap + c * aq
                rp = a[p, :].copy()
                rq = a[q, :].copy()
                a[p, :] = c * rp - s * rq
                a[q, :] = s * rp + c * rq
                a[p, p] = app - t * apq
                a[q, q] = aqq + t * apq
                a[p, q] = 0.0
                a[q, p] = 0.0
                vp = v[:, p].copy()
                v[:, p] = c * vp - s * v[:, q]
                v[:, q] = s * vp + c * v[:, q]
    vals = a.diagonal().copy()
    order = np.argsort(vals, kind="stable")
    return vals[order], v[:, order]
