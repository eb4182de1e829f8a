import math

import numpy as np
import pytest
from scipy import stats

from noise_lab.core import Configuration, RandomStream
from noise_lab.graphs.edges import (DENSE_SLOTS, EdgeConfig, edge_index, edge_pair, induced,
                                    largest_component, noise_edges, num_slots, sample_edges)


def test_index_roundtrip_exhaustive():
    for n in list(range(2, 60)) + [500, 1999, 2000]:
        idx = np.arange(num_slots(n))
        u, v = edge_pair(idx, n)
        assert np.all(u < v) and np.all(v < n)
        assert np.array_equal(edge_index(u, v, n), idx)


def test_index_formula_and_large_n():
    n = 10**5
    u = np.array([0, 1, 5000, n - 2])
    v = np.array([1, n - 1, 77777, n - 1])
    idx = edge_index(u, v, n)
    assert np.array_equal(idx, u * n - u * (u + 1) // 2 + (v - u - 1))
    uu, vv = edge_pair(idx, n)
    assert np.array_equal(uu, u) and np.array_equal(vv, v)
    with pytest.raises(ValueError):
        edge_index(3, 3, 10)


def test_configuration_roundtrip():
    g = EdgeConfig.from_pairs(5, [(0, 1), (3, 2), (1, 4)])
    c = g.to_configuration()
    assert len(c) == 10
    assert EdgeConfig.from_configuration(5, c) == g
    assert g.has_edge(2, 3) and not g.has_edge(0, 2)
    assert list(g.degrees) == [1, 2, 1, 1, 1]


def test_dense_sampler_matches_core_bits():
    from noise_lab.core import sample_configuration
    n = 30
    g = sample_edges(n, 0.3, RandomStream(4, 2))
    c = sample_configuration(num_slots(n), 0.3, RandomStream(4, 2))
    assert g == EdgeConfig.from_configuration(n, c)


def test_pins():
    g = sample_edges(20, 0.5, RandomStream(1, 1), ones=[0, 1, 2], zeros=[3, 4])
    assert g.any_of([0]) and g.has_edge(0, 1) and not g.any_of([3, 4])
    big = sample_edges(2000, 0.001, RandomStream(1, 1), ones=[5], zeros=[7])
    assert big.any_of([5]) and not big.any_of([7])


def test_sparse_edge_count_law():
    n = 2000
    assert num_slots(n) > DENSE_SLOTS
    p = 2 / n
    m = num_slots(n)
    counts = np.array([len(sample_edges(n, p, RandomStream(2, s))) for s in range(300)])
    assert abs(counts.mean() - m * p) < 4 * math.sqrt(m * p * (1 - p) / 300)


def test_sparse_slots_uniform():
    n = 1500
    hits = np.zeros(num_slots(n) // 100000 + 1)
    for s in range(200):
        e = sample_edges(n, 0.01, RandomStream(3, s)).edges
        hits += np.bincount(e // 100000, minlength=hits.size)
    width = np.minimum(100000, num_slots(n) - 100000 * np.arange(hits.size))
    exp = hits.sum() * width / width.sum()
    assert stats.chisquare(hits, exp).pvalue > 1e-4


@pytest.mark.parametrize("n", [40, 2000])
def test_noise_per_slot_law(n):
    """Given a present edge, survival probability is 1 - eps(1-p); an absent
    slot turns on with probability eps p."""
    p, eps = 0.05 if n == 40 else 0.002, 0.3
    keep = on = present = absent = 0
    for s in range(400 if n == 40 else 60):
        g = sample_edges(n, p, RandomStream(5, s))
        h = noise_edges(g, p, eps, RandomStream(5, s, 1))
        inter = np.intersect1d(g.edges, h.edges).size
        keep += inter
        present += len(g)
        on += len(h) - inter
        absent += num_slots(n) - len(g)
    s1 = 1 - eps * (1 - p)
    assert abs(keep / present - s1) < 4 * math.sqrt(s1 * (1 - s1) / present)
    assert abs(on / absent - eps * p) < 4 * math.sqrt(eps * p / absent)


def test_zero_noise_identity():
    g = sample_edges(3000, 1e-3, RandomStream(6, 0))
    assert noise_edges(g, 1e-3, 0.0, RandomStream(6, 0, 1)) is g


def test_components_and_induced():
    g = EdgeConfig.from_pairs(8, [(0, 1), (1, 2), (3, 4), (5, 6), (6, 7), (5, 7)])
    lc = largest_component(g)
    assert list(lc) == [0, 1, 2]
    sub = induced(g, [5, 6, 7, 0])
    assert len(sub) == 3
    assert EdgeConfig.complete(5).degrees.tolist() == [4] * 5
    with pytest.raises(IndexError):
        EdgeConfig(4, [6])
