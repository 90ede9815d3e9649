"""Random block-structured graphs and Laplacian spectrum diagnostics."""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .core import Partition, as_rng
from ._kernels import jacobi_eigh
from .transport import DiscreteMeasure, w2_1d


@dataclass(frozen=True)
class Graph:
    """Simple undirected graph as a dense symmetric 0/1 adjacency matrix."""

    adjacency: np.ndarray

    def __post_init__(self):
        adj = np.asarray(self.adjacency)
        if adj.ndim != 2 or adj.shape[0] != adj.shape[1]:
            raise ValueError(f"adjacency must be square, got shape {adj.shape}")
        if not np.array_equal(adj, adj.T):
            raise ValueError("adjacency must be symmetric")
        if np.any(np.diagonal(adj) != 0):
            raise ValueError("self-loops are not allowed")
        values = np.unique(adj)
        if not np.all(np.isin(values, (0, 1))):
            raise ValueError("adjacency entries must be 0 or 1")
        object.__setattr__(self, "adjacency", adj.astype(np.int8))

    @property
    def n(self) -> int:
        return self.adjacency.shape[0]

    def laplacian(self) -> np.ndarray:
        adj = self.adjacency.astype(np.float64)
        return np.diag(adj.sum(axis=1)) - adj


def sbm_generate(block_sizes, edge_probs, rng=0) -> Graph:
    """Stochastic block model: each unordered pair is edged independently
    with the probability indexed by its endpoints' blocks."""
    sizes = np.asarray(block_sizes, dtype=np.int64)
    probs = np.asarray(edge_probs, dtype=np.float64)
    if probs.shape != (len(sizes), len(sizes)):
        raise ValueError("edge_probs must be square with one row per block")
    if not np.allclose(probs, probs.T):
        raise ValueError("edge_probs must be symmetric")
    if np.any(probs < 0) or np.any(probs > 1):
        raise ValueError("edge probabilities must lie in [0, 1]")
    rng = as_rng(rng)
    block = np.repeat(np.arange(len(sizes)), sizes)
    n = int(sizes.sum())
    pair_probs = probs[block[:, None], block[None, :]]
    draws = rng.random((n, n))
    upper = np.triu(draws < pair_probs, k=1)
    adj = (upper | upper.T).astype(np.int8)
    return Graph(adj)


def laplacian_spectrum(g: Graph) -> np.ndarray:
    """Ascending eigenvalues of the unnormalized Laplacian D - A."""
    vals, _ = jacobi_eigh(g.laplacian())
    return vals


def _zero_tolerance(vals: np.ndarray) -> float:
    scale = float(np.max(np.abs(vals))) if len(vals) else 0.0
    return 1e-8 * max(1.0, scale)


def spectral_embedding(g: Graph, dims: int) -> np.ndarray:
    """Node coordinates from the smallest nontrivial Laplacian eigenvectors.

    The constant direction is removed from the zero eigenspace (so for a
    disconnected graph the leading columns are component-indicator
    contrasts); remaining columns follow eigenvalue order, ties by index.
    Each column is unit-norm with its largest-magnitude entry positive.
    """
    if dims >= g.n:
        raise ValueError(f"dims must be < n ({g.n})")
    lap = g.laplacian()
    vals, vecs = jacobi_eigh(lap)
    tol = _zero_tolerance(vals)
    zero_mask = np.abs(vals) <= tol
    n_zero = int(np.sum(zero_mask))
    constant = np.full((g.n, 1), 1.0 / np.sqrt(g.n))
    if n_zero >= 1:
        # Re-orthonormalize the zero eigenspace starting from the constant
        # vector, then drop the constant; order within the space is inherited.
        basis = np.concatenate([constant, vecs[:, zero_mask]], axis=1)
        q, r = np.linalg.qr(basis)
        keep = np.abs(np.diagonal(r)) > 1e-10
        zero_cols = q[:, keep][:, 1:n_zero]
        columns = [zero_cols, vecs[:, ~zero_mask]]
    else:
        columns = [vecs[:, 1:]]  # degenerate numerics: skip the smallest
    embedding = np.concatenate(columns, axis=1)[:, :dims]
    norms = np.linalg.norm(embedding, axis=0)
    norms[norms == 0] = 1.0
    embedding = embedding / norms
    for j in range(embedding.shape[1]):
        pivot = int(np.argmax(np.abs(embedding[:, j])))
        if embedding[pivot, j] < 0:
            embedding[:, j] = -embedding[:, j]
    return embedding


def subgraph_spectrum_w2(g: Graph, node_subset) -> float:
    """W2 distance between the graph spectrum and an induced subgraph's
    spectrum, both as uniform 1-D measures."""
    nodes = np.asarray(node_subset, dtype=np.int64)
    if nodes.size == 0:
        raise ValueError("node subset must be nonempty")
    sub = Graph(g.adjacency[np.ix_(nodes, nodes)])
    full_spec = laplacian_spectrum(g)
    sub_spec = laplacian_spectrum(sub)
    return w2_1d(
        DiscreteMeasure.uniform(full_spec[:, None]),
        DiscreteMeasure.uniform(sub_spec[:, None]),
    )


@dataclass(frozen=True)
class SpectrumReport:
    graph_spectrum: np.ndarray
    subgraph_spectra: list[np.ndarray]
    per_subgraph_w2: np.ndarray
    mean_w2: float
    std_w2: float


def spectrum_report(g: Graph, part: Partition, std_ddof: int = 1) -> SpectrumReport:
    """Spectrum distances between the graph and the induced subgraphs of a
    node partition."""
    full_spec = laplacian_spectrum(g)
    full_measure = DiscreteMeasure.uniform(full_spec[:, None])
    spectra = []
    dists = []
    for members in part.groups():
        sub = Graph(g.adjacency[np.ix_(members, members)])
        spec = laplacian_spectrum(sub)
        spectra.append(spec)
        dists.append(w2_1d(full_measure, DiscreteMeasure.uniform(spec[:, None])))
    dists = np.asarray(dists)
    std = float(dists.std(ddof=std_ddof)) if len(dists) > std_ddof else 0.0
    return SpectrumReport(full_spec, spectra, dists, float(dists.mean()), std)


def graph_to_edgelist_csv(g: Graph, path) -> None:
    """Write one (u, v) row per edge, 0-based, u < v."""
    rows = np.argwhere(np.triu(g.adjacency, k=1) > 0)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        for u, v in rows:
            writer.writerow([int(u), int(v)])


def graph_from_edgelist_csv(path, num_nodes: int | None = None) -> Graph:
    """Read a (u, v) edge list; num_nodes covers trailing isolated nodes."""
    edges = []
    with open(path, newline="", encoding="utf-8") as fh:
        for row in csv.reader(fh):
            if not row:
                continue
            edges.append((int(row[0]), int(row[1])))
    n = num_nodes if num_nodes is not None else (
        max((max(u, v) for u, v in edges), default=-1) + 1
    )
    adj = np.zeros((n, n), dtype=np.int8)
    for u, v in edges:
        adj[u, v] = 1
        adj[v, u] = 1
    return Graph(adj)
