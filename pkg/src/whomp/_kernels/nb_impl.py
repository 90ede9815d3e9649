"""Numba-jitted implementations of the hot numeric kernels.

Same contracts as np_impl; scalar loops instead of vectorized expressions so
nopython compilation stays trivial.  Compiled artifacts are cached on disk.
"""

import math

import numpy as np
from numba import njit


@njit(cache=True)
def pairwise_sqdist(a, b):
    n = a.shape[0]
    m = b.shape[0]
    d = a.shape[1]
    out = np.empty((n, m), dtype=np.float64)
    for i in range(n):
        for j in range(m):
            acc = 0.0
            for k in range(d):
                diff = a[i, k] - b[j, k]
                acc += diff * diff
            out[i, j] = acc
    return out


@njit(cache=True)
def w2_1d_sqcost(xs, xw, ys, yw):
    n = xs.shape[0]
    m = ys.shape[0]
    i = 0
    j = 0
    wi = xw[0]
    wj = yw[0]
    cost = 0.0
    while True:
        mass = wi if wi < wj else wj
        diff = xs[i] - ys[j]
        cost += mass * diff * diff
        wi -= mass
        wj -= mass
        if wi <= 0.0:
            i += 1
            if i >= n:
                break
            wi = xw[i]
        if wj <= 0.0:
            j += 1
            if j >= m:
                break
            wj = yw[j]
    return cost


@njit(cache=True)
def jacobi_eigh(a_in, rel_tol=1e-12, max_sweeps=100):
    n = a_in.shape[0]
    a = a_in.copy()
    v = np.eye(n)
    if n == 1:
        return np.diag(a).copy(), v
    norm_sq = 0.0
    for i in range(n):
        for j in range(n):
            norm_sq += a[i, j] * a[i, j]
    if norm_sq == 0.0:
        return np.zeros(n), v
    thresh = rel_tol * math.sqrt(norm_sq)
    skip = thresh / (2.0 * n)
    for _ in range(max_sweeps):
        off_sq = 0.0
        for i in range(n - 1):
            for j in range(i + 1, n):
                off_sq += 2.0 * a[i, j] * a[i, j]
        if off_sq <= thresh * thresh:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if abs(apq) <= skip:
                    continue
                app = a[p, p]
                aqq = a[q, q]
                theta = (aqq - app) / (2.0 * apq)
                if abs(theta) > 1e150:
                    t = 1.0 / (2.0 * theta)
                elif theta == 0.0:
                    t = 1.0
                else:
                    sign = 1.0 if theta > 0.0 else -1.0
                    t = sign / (abs(theta) + math.hypot(theta, 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                for i in range(n):
                    aip = a[i, p]
                    aiq = a[i, q]
                    a[i, p] = c * aip - s * aiq
                    a[i, q] = s * aip + c * aiq
                for i in range(n):
                    api = a[p, i]
                    aqi = a[q, i]
                    a[p, i] = c * api - s * aqi
                    a[q, i] = s * api + c * aqi
                a[p, p] = app - t * apq
                a[q, q] = aqq + t * apq
                a[p, q] = 0.0
                a[q, p] = 0.0
                for i in range(n):
                    vip = v[i, p]
                    viq = v[i, q]
                    v[i, p] = c * vip - s * viq
                    v[i, q] = s * vip + c * viq
    vals = np.empty(n, dtype=np.float64)
    for i in range(n):
        vals[i] = a[i, i]
    order = np.argsort(vals, kind="mergesort")
    return vals[order], v[:, order]
