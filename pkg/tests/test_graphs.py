"""Block-model graphs, Laplacian spectra, spectral embedding."""

import numpy as np
import pytest

from whomp.core import Rng
from whomp.graphs import (
    Graph,
    graph_from_edgelist_csv,
    graph_to_edgelist_csv,
    laplacian_spectrum,
    sbm_generate,
    spectral_embedding,
    spectrum_report,
    subgraph_spectrum_w2,
)
from whomp.properties import check_graph_spectra
from whomp.transport import DiscreteMeasure, w2_exact


def complete_graph(n):
    return Graph((np.ones((n, n)) - np.eye(n)).astype(np.int8))


def test_sbm_extreme_probabilities():
    empty = sbm_generate((3, 4), np.zeros((2, 2)), rng=0)
    assert empty.adjacency.sum() == 0
    full = sbm_generate((3, 4), np.ones((2, 2)), rng=0)
    assert full.adjacency.sum() == 7 * 6  # complete graph on 7 nodes


def test_sbm_density_monte_carlo():
    probs = np.full((3, 3), 0.2) + 0.4 * np.eye(3)
    rng = Rng(1)
    within, within_pairs = 0, 0
    for t in range(200):
        g = sbm_generate((10, 20, 30), probs, rng=rng.child(t))
        a = g.adjacency
        blocks = [range(0, 10), range(10, 30), range(30, 60)]
        for b in blocks:
            idx = np.ix_(list(b), list(b))
            within += np.triu(a[idx], 1).sum()
            within_pairs += len(b) * (len(b) - 1) // 2
    density = within / within_pairs
    assert abs(density - 0.6) < 0.05


def test_sbm_validation():
    with pytest.raises(ValueError, match="probabilities"):
        sbm_generate((2, 2), np.array([[0.5, 1.2], [1.2, 0.5]]), rng=0)
    with pytest.raises(ValueError, match="symmetric"):
        sbm_generate((2, 2), np.array([[0.5, 0.1], [0.2, 0.5]]), rng=0)


def test_graph_validation():
    with pytest.raises(ValueError, match="symmetric"):
        Graph(np.array([[0, 1], [0, 0]]))
    with pytest.raises(ValueError, match="self-loops"):
        Graph(np.eye(2, dtype=int))


def test_spectrum_closed_forms():
    assert np.max(np.abs(laplacian_spectrum(Graph(np.zeros((5, 5), dtype=np.int8))))) == 0
    spec = laplacian_spectrum(complete_graph(6))
    assert np.max(np.abs(spec - np.array([0, 6, 6, 6, 6, 6.0]))) < 1e-10
    path3 = Graph(np.array([[0, 1, 0], [1, 0, 1], [0, 1, 0]], dtype=np.int8))
    assert np.max(np.abs(laplacian_spectrum(path3) - np.array([0.0, 1.0, 3.0]))) < 1e-10


def test_embedding_two_cliques_sign_split():
    adj = np.zeros((8, 8), dtype=np.int8)
    adj[:4, :4] = 1 - np.eye(4, dtype=np.int8)
    adj[4:, 4:] = 1 - np.eye(4, dtype=np.int8)
    emb = spectral_embedding(Graph(adj), 1)[:, 0]
    assert len({s for s in np.sign(emb[:4])}) == 1
    assert len({s for s in np.sign(emb[4:])}) == 1
    assert np.sign(emb[0]) != np.sign(emb[7])


def test_embedding_complete_graph_orthonormal():
    emb = spectral_embedding(complete_graph(6), 2)
    gram = emb.T @ emb
    assert np.max(np.abs(gram - np.eye(2))) < 1e-10
    lap = complete_graph(6).laplacian()
    for j in range(2):
        v = emb[:, j]
        lam = v @ lap @ v
        assert np.linalg.norm(lap @ v - lam * v) < 1e-8 * 6


def test_embedding_dims_guard_and_sign_fix():
    g = complete_graph(4)
    with pytest.raises(ValueError, match="dims"):
        spectral_embedding(g, 4)
    emb = spectral_embedding(g, 2)
    for j in range(2):
        pivot = np.argmax(np.abs(emb[:, j]))
        assert emb[pivot, j] > 0


def test_subgraph_spectrum_w2_examples():
    g = complete_graph(4)
    assert subgraph_spectrum_w2(g, np.arange(4)) < 1e-12
    empty = Graph(np.zeros((5, 5), dtype=np.int8))
    assert subgraph_spectrum_w2(empty, np.arange(3)) == 0.0
    # K4 with a 2-node subset: spectra {0,4,4,4} vs {0,2}
    value = subgraph_spectrum_w2(g, np.array([0, 1]))
    lp = w2_exact(
        DiscreteMeasure.uniform(np.array([0.0, 4.0, 4.0, 4.0])[:, None]),
        DiscreteMeasure.uniform(np.array([0.0, 2.0])[:, None]),
    )[0]
    assert abs(value - lp) < 1e-12
    assert abs(value**2 - 6.0) < 1e-10  # quantile walk: 16*(1/4) + 4*(1/2)
    with pytest.raises(ValueError, match="nonempty"):
        subgraph_spectrum_w2(g, [])


def test_spectrum_report_shape():
    g = sbm_generate((5, 5), np.array([[0.8, 0.1], [0.1, 0.8]]), rng=2)
    from whomp.core import Partition

    part = Partition(np.arange(10) % 2, 2)
    rep = spectrum_report(g, part)
    assert len(rep.per_subgraph_w2) == 2
    assert rep.mean_w2 == pytest.approx(float(np.mean(rep.per_subgraph_w2)))
    assert len(rep.graph_spectrum) == 10


def test_edgelist_round_trip(tmp_path):
    g = sbm_generate((4, 4), np.array([[0.9, 0.2], [0.2, 0.9]]), rng=3)
    path = tmp_path / "edges.csv"
    graph_to_edgelist_csv(g, path)
    back = graph_from_edgelist_csv(path, num_nodes=8)
    assert np.array_equal(back.adjacency, g.adjacency)
    # without num_nodes, trailing isolated nodes are dropped
    inferred = graph_from_edgelist_csv(path)
    edges = np.argwhere(np.triu(g.adjacency, 1))
    last = int(edges.max()) + 1
    assert inferred.n == last
    assert np.array_equal(inferred.adjacency, g.adjacency[:last, :last])


def test_property_check():
    result = check_graph_spectra(instances=6)
    assert result.passed, result.detail
